#include "rmk/syncat/syncat.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace rmk::syncat {

using lf::TermPtr;

namespace {

std::string var(size_t i) { return "x" + std::to_string(i + 1); }

std::vector<std::vector<int>> compositions(int total, int parts) {
  std::vector<std::vector<int>> out;
  if (parts == 0) {
    if (total == 0) out.push_back({});
    return out;
  }
  for (int first = 1; first <= total - (parts - 1); ++first)
    for (auto rest : compositions(total - first, parts - 1)) {
      rest.insert(rest.begin(), first);
      out.push_back(std::move(rest));
    }
  return out;
}

// Beta-normal surface pre-terms of an exact size, scope-correct but untyped.
class Generator {
 public:
  Generator(const lf::Signature& sig, size_t& count, size_t cap) : count_(count), cap_(cap) {
    for (const auto& d : sig.decls()) (d.sort == lf::SortKind::Type ? terms_ : formers_).push_back(&d);
  }

  std::vector<TermPtr> terms(const std::vector<std::string>& scope, int n) {
    std::vector<TermPtr> out;
    if (n == 1)
      for (const auto& v : scope) push(out, lf::mk_var(v));
    syms(out, terms_, scope, n);
    if (n >= 2) {
      auto v = binder(scope);
      auto inner = scope;
      inner.push_back(v);
      for (const auto& b : terms(inner, n - 1)) push(out, lf::mk_abs(nullptr, v, b));
      for (const auto& s : terms(scope, n - 1)) push(out, lf::mk_refl(s));
    }
    for (int k = 1; k + 2 <= n; ++k)
      for (const auto& f : terms(scope, k)) {
        if (f->is(lf::TermKind::Abs)) continue;
        for (const auto& a : terms(scope, n - 1 - k)) push(out, lf::mk_surface_app(f, a));
      }
    return out;
  }

  std::vector<TermPtr> types(const std::vector<std::string>& scope, int n) {
    std::vector<TermPtr> out;
    syms(out, formers_, scope, n);
    auto v = binder(scope);
    auto inner = scope;
    inner.push_back(v);
    for (int k = 1; k + 2 <= n; ++k)
      for (const auto& d : types(scope, k))
        for (const auto& c : types(inner, n - 1 - k)) push(out, lf::mk_pi(d, v, c));
    for (const auto& parts : compositions(n - 1, 3)) {
      if (n - 1 < 3) break;
      for (const auto& t : types(scope, parts[0]))
        for (const auto& a : terms(scope, parts[1]))
          for (const auto& b : terms(scope, parts[2])) push(out, lf::mk_eq(t, a, b));
    }
    return out;
  }

  bool exhausted() const { return count_ > cap_; }

 private:
  size_t& count_;
  size_t cap_;
  std::vector<const lf::Decl*> terms_;
  std::vector<const lf::Decl*> formers_;

  void push(std::vector<TermPtr>& out, TermPtr t) {
    ++count_;
    if (count_ <= cap_) out.push_back(std::move(t));
  }

  static std::string binder(const std::vector<std::string>& scope) {
    return "v" + std::to_string(scope.size() + 1);
  }

  void syms(std::vector<TermPtr>& out, const std::vector<const lf::Decl*>& ds, const std::vector<std::string>& scope,
            int n) {
    for (const auto* d : ds) {
      int k = static_cast<int>(d->context.size());
      if (k == 0) {
        if (n == 1) push(out, lf::mk_sym(d->name));
        continue;
      }
      for (const auto& parts : compositions(n - 1, k)) {
        std::vector<std::vector<TermPtr>> choices;
        for (int p : parts) choices.push_back(terms(scope, p));
        std::vector<TermPtr> args(k);
        std::function<void(int)> go = [&](int i) {
          if (i == k) {
            push(out, lf::mk_sym(d->name, args));
            return;
          }
          for (const auto& a : choices[i]) {
            args[i] = a;
            go(i + 1);
          }
        };
        go(0);
      }
    }
  }
};

std::vector<std::string> scope_of(const lf::Context& c) {
  std::vector<std::string> s;
  for (const auto& [x, _] : c) s.push_back(x);
  return s;
}

bool same_context(const lf::Context& a, const lf::Context& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!lf::alpha_eq(a[i].second, b[i].second)) return false;
  return true;
}

// Equality of tuples G -> D, component by component.
bool tuples_equal(lf::Checker& ck, const lf::Context& g, const lf::Context& d, const std::vector<TermPtr>& f,
                  const std::vector<TermPtr>& h, bool& incomplete) {
  lf::Substitution s;
  for (size_t i = 0; i < d.size(); ++i) {
    TermPtr bi = lf::substitute(d[i].second, s);
    bool eq = false;
    try {
      eq = ck.equal(g, f[i], h[i], bi);
    } catch (const lf::CheckError&) {
      incomplete = true;
    }
    incomplete = incomplete || ck.incomplete();
    if (!eq) return false;
    s[d[i].first] = f[i];
  }
  return true;
}

std::vector<TermPtr> substitute_all(const std::vector<TermPtr>& g, const lf::Context& d,
                                    const std::vector<TermPtr>& f) {
  auto s = lf::morphism_substitution(d, f);
  std::vector<TermPtr> out;
  for (const auto& t : g) out.push_back(lf::substitute(t, s));
  return out;
}

std::vector<TermPtr> projection(size_t n) {
  std::vector<TermPtr> out;
  for (size_t i = 0; i < n; ++i) out.push_back(lf::mk_var(var(i)));
  return out;
}

std::optional<int> class_in(lf::Checker& ck, const SynCat& sc, int g, int d, const std::vector<TermPtr>& f,
                            bool& incomplete) {
  for (int a : sc.hom(g, d))
    if (tuples_equal(ck, sc.contexts[g].ctx, sc.contexts[d].ctx, f, sc.arrows[a].rep, incomplete)) return a;
  return std::nullopt;
}

}  // namespace

std::string to_string(const Bounds& b) {
  return "depth " + std::to_string(b.depth) + ", size " + std::to_string(b.size) + ", max count " +
         std::to_string(b.max_count);
}

std::vector<int> SynCat::hom(int a, int b) const {
  std::vector<int> out;
  for (int k = 0; k < static_cast<int>(arrows.size()); ++k)
    if (arrows[k].src == a && arrows[k].tgt == b) out.push_back(k);
  return out;
}

std::optional<int> SynCat::find_context(const lf::Context& c) const {
  for (int i = 0; i < static_cast<int>(contexts.size()); ++i)
    if (same_context(contexts[i].ctx, c)) return i;
  return std::nullopt;
}

SynCat build_syncat(const lf::CheckedSignature& sig, const Bounds& bounds) {
  SynCat sc;
  sc.bounds = bounds;
  lf::Checker ck(sig.sig);
  Generator gen(sig.sig, sc.candidates, bounds.max_count);
  bool incomplete = false;

  // Contexts, by length.
  sc.contexts.push_back({{}, false});
  size_t level_begin = 0;
  for (int len = 1; len <= bounds.depth && !sc.overflow; ++len) {
    size_t level_end = sc.contexts.size();
    for (size_t c = level_begin; c < level_end && !sc.overflow; ++c) {
      lf::Context base = sc.contexts[c].ctx;
      for (int n = 1; n <= bounds.size && !sc.overflow; ++n) {
        for (const auto& t : gen.types(scope_of(base), n)) {
          bool rep = false;
          TermPtr et;
          try {
            et = ck.normalize(ck.check_type_former(base, t, &rep));
          } catch (const lf::CheckError&) {
            continue;
          }
          lf::Context ext = base;
          ext.emplace_back(var(base.size()), et);
          if (!sc.find_context(ext)) sc.contexts.push_back({ext, rep});
        }
        sc.overflow = gen.exhausted();
      }
    }
    level_begin = level_end;
  }

  // Hom classes, one tuple at a time.
  int nc = static_cast<int>(sc.contexts.size());
  std::vector<std::vector<std::vector<TermPtr>>> samples;  // per arrow, up to 3 members
  for (int g = 0; g < nc && !sc.overflow; ++g) {
    const lf::Context& gc = sc.contexts[g].ctx;
    std::vector<std::vector<TermPtr>> pool(bounds.size + 1);
    for (int n = 1; n <= bounds.size; ++n) pool[n] = gen.terms(scope_of(gc), n);
    sc.overflow = gen.exhausted();
    for (int d = 0; d < nc && !sc.overflow; ++d) {
      const lf::Context& dc = sc.contexts[d].ctx;
      std::vector<TermPtr> cur;
      lf::Substitution s;
      size_t first = sc.arrows.size();
      std::function<void(size_t)> go = [&](size_t i) {
        if (sc.overflow) return;
        if (i == dc.size()) {
          if (++sc.candidates > bounds.max_count) {
            sc.overflow = true;
            return;
          }
          for (size_t a = first; a < sc.arrows.size(); ++a)
            if (tuples_equal(ck, gc, dc, cur, sc.arrows[a].rep, incomplete)) {
              ++sc.arrows[a].members;
              if (samples[a].size() < 3) samples[a].push_back(cur);
              return;
            }
          sc.arrows.push_back({g, d, cur, 1, false, false});
          samples.push_back({cur});
          return;
        }
        TermPtr bi = lf::substitute(dc[i].second, s);
        for (int n = 1; n <= bounds.size; ++n)
          for (const auto& t : pool[n]) {
            TermPtr et;
            try {
              et = ck.check(gc, t, bi);
            } catch (const lf::CheckError&) {
              continue;
            }
            cur.push_back(et);
            s[dc[i].first] = et;
            go(i + 1);
            cur.pop_back();
            s.erase(dc[i].first);
          }
      };
      go(0);
    }
  }

  int na = static_cast<int>(sc.arrows.size());
  sc.identity.assign(nc, -1);
  for (int c = 0; c < nc; ++c)
    if (auto a = class_in(ck, sc, c, c, projection(sc.contexts[c].ctx.size()), incomplete)) sc.identity[c] = *a;

  // Composition on representatives, spot-checked on other members.
  bool closed = !sc.overflow;
  bool well_defined = true;
  sc.composite.assign(na, std::vector<int>(na, -1));
  for (int g = 0; g < na && !sc.overflow; ++g)
    for (int f = 0; f < na; ++f) {
      if (sc.arrows[f].tgt != sc.arrows[g].src) continue;
      int a = sc.arrows[f].src, b = sc.arrows[f].tgt, c = sc.arrows[g].tgt;
      auto h = class_in(ck, sc, a, c, substitute_all(sc.arrows[g].rep, sc.contexts[b].ctx, sc.arrows[f].rep),
                        incomplete);
      if (!h) {
        closed = false;
        continue;
      }
      sc.composite[g][f] = *h;
      for (const auto& gm : samples[g])
        for (const auto& fm : samples[f])
          if (!tuples_equal(ck, sc.contexts[a].ctx, sc.contexts[c].ctx, substitute_all(gm, sc.contexts[b].ctx, fm),
                            sc.arrows[*h].rep, incomplete))
            well_defined = false;
    }
  if (!well_defined) sc.caveats.push_back("composition depends on representatives");
  if (std::find(sc.identity.begin(), sc.identity.end(), -1) != sc.identity.end()) closed = false;

  if (closed && well_defined) {
    std::vector<std::string> objs;
    for (int c = 0; c < nc; ++c) objs.push_back("G" + std::to_string(c));
    std::vector<cat::Arrow> arrs;
    for (int k = 0; k < na; ++k) {
      const auto& a = sc.arrows[k];
      std::string name = sc.identity[a.src] == k ? "id_G" + std::to_string(a.src) : "a" + std::to_string(k);
      arrs.push_back({name, a.src, a.tgt});
    }
    std::vector<cat::Arr> ids(sc.identity.begin(), sc.identity.end());
    std::vector<cat::Arr> table(static_cast<size_t>(na) * na, cat::kNone);
    for (int g = 0; g < na; ++g)
      for (int f = 0; f < na; ++f)
        if (sc.composite[g][f] >= 0) table[static_cast<size_t>(g) * na + f] = sc.composite[g][f];
    try {
      cat::FinCat c("sRM", objs, arrs, ids, table);
      cat::validate(c);
      sc.cat = std::move(c);
    } catch (const cat::LawError& e) {
      sc.caveats.push_back(std::string("bounded category is not a category: ") + e.what());
    }
  } else if (!closed) {
    sc.caveats.push_back("composition leaves the bounds");
  }

  // Generators, then composites of generators and isomorphisms.
  for (int c = 0; c < nc; ++c) {
    const auto& ctx = sc.contexts[c].ctx;
    if (ctx.empty() || !sc.contexts[c].representable_last) continue;
    lf::Context prefix(ctx.begin(), ctx.end() - 1);
    auto p = sc.find_context(prefix);
    if (!p) continue;
    if (auto a = class_in(ck, sc, c, *p, projection(prefix.size()), incomplete)) sc.arrows[*a].generating = true;
  }
  for (int k = 0; k < na; ++k)
    sc.arrows[k].representable = sc.arrows[k].generating || sc.identity[sc.arrows[k].src] == k ||
                                 (sc.cat && sc.cat->is_iso(k));
  for (bool changed = true; changed;) {
    changed = false;
    for (int g = 0; g < na; ++g)
      for (int f = 0; f < na; ++f) {
        int h = sc.composite[g][f];
        if (h >= 0 && !sc.arrows[h].representable && sc.arrows[g].representable && sc.arrows[f].representable)
          sc.arrows[h].representable = changed = true;
      }
  }
  sc.caveats.push_back("representability is limited to composites found within the bounds");

  sc.equality_incomplete = incomplete;
  if (incomplete) sc.caveats.push_back("equality-incomplete: some equality queries were undecided");
  if (sc.overflow) sc.caveats.push_back("overflow: enumeration stopped at " + std::to_string(bounds.max_count));
  return sc;
}

std::optional<int> find_class(const lf::CheckedSignature& sig, const SynCat& sc, int g, int d,
                              const std::vector<TermPtr>& f) {
  lf::Checker ck(sig.sig);
  bool incomplete = false;
  return class_in(ck, sc, g, d, f, incomplete);
}

bool check_terminal(const SynCat& sc) {
  auto e = sc.find_context({});
  if (!e) return false;
  for (int c = 0; c < static_cast<int>(sc.contexts.size()); ++c)
    if (sc.hom(c, *e).size() != 1) return false;
  return true;
}

std::vector<int> generating_representables(const SynCat& sc) {
  std::vector<int> out;
  for (int k = 0; k < static_cast<int>(sc.arrows.size()); ++k)
    if (sc.arrows[k].generating) out.push_back(k);
  return out;
}

PullbackCheck pullback_of(const lf::CheckedSignature& sig, const SynCat& sc, int generator, int along) {
  PullbackCheck pc;
  pc.generator = generator;
  pc.along = along;
  const SynArrow& p = sc.arrows[generator];
  const SynArrow& s = sc.arrows[along];
  if (!p.generating || s.tgt != p.tgt) {
    pc.note = "not a generator with a map into its codomain";
    return pc;
  }
  const lf::Context& dy = sc.contexts[p.src].ctx;
  const lf::Context& d = sc.contexts[p.tgt].ctx;
  const lf::Context& g = sc.contexts[s.src].ctx;
  if (static_cast<int>(g.size()) + 1 > sc.bounds.depth) {
    pc.note = "pullback context exceeds the depth bound";
    return pc;
  }
  lf::Checker ck(sig.sig);
  bool incomplete = false;
  TermPtr b = lf::substitute(dy.back().second, lf::morphism_substitution(d, s.rep));
  lf::Context apex = g;
  try {
    apex.emplace_back(var(g.size()), ck.normalize(ck.check_type_former(g, b)));
  } catch (const lf::CheckError& e) {
    pc.note = std::string("substituted type does not check: ") + e.what();
    return pc;
  }
  auto a = sc.find_context(apex);
  if (!a) {
    pc.note = "pullback context exceeds the size bound";
    return pc;
  }
  pc.apex = *a;
  auto q = s.rep;
  q.push_back(lf::mk_var(var(g.size())));
  auto p1 = class_in(ck, sc, *a, p.src, q, incomplete);
  auto p2 = class_in(ck, sc, *a, s.src, projection(g.size()), incomplete);
  if (!p1 || !p2) {
    pc.apex = -1;
    pc.note = "projections exceed the size bound";
    return pc;
  }
  pc.p1 = *p1;
  pc.p2 = *p2;
  if (!sc.cat) {
    pc.note = "no bounded category to test the universal property in";
    return pc;
  }
  pc.verified = cat::is_pullback(*sc.cat, generator, along, pc.p1, pc.p2);
  pc.note = pc.verified ? "pullback within bounds" : "universal property fails within bounds";
  return pc;
}

PullbackReport check_representable_pullbacks(const lf::CheckedSignature& sig, const SynCat& sc) {
  PullbackReport r;
  for (int gen : generating_representables(sc))
    for (int s = 0; s < static_cast<int>(sc.arrows.size()); ++s) {
      if (sc.arrows[s].tgt != sc.arrows[gen].tgt) continue;
      auto pc = pullback_of(sig, sc, gen, s);
      if (pc.verified) ++r.verified;
      else if (pc.apex < 0 && pc.note.find("exceeds") != std::string::npos) ++r.out_of_bounds;
      r.checks.push_back(std::move(pc));
    }
  return r;
}

std::string context_text(const SynContext& c) { return c.ctx.empty() ? "()" : lf::print_context(c.ctx); }

std::string arrow_text(const SynCat& sc, int a) {
  const auto& arr = sc.arrows[a];
  std::string out = "(";
  const auto& d = sc.contexts[arr.tgt].ctx;
  for (size_t i = 0; i < arr.rep.size(); ++i) {
    if (i) out += ", ";
    out += d[i].first + " := " + lf::print_term(arr.rep[i]);
  }
  return out + ")";
}

std::string fincat_dump(const SynCat& sc) {
  if (!sc.cat) throw std::logic_error("bounded syntactic category has no composition table");
  const cat::FinCat& c = *sc.cat;
  std::ostringstream os;
  os << "# bounded syntactic category, " << to_string(sc.bounds) << "\n";
  os << "category " << c.name() << "\n";
  for (int o = 0; o < c.num_objects(); ++o) os << "object " << c.object_name(o) << "  # " << context_text(sc.contexts[o]) << "\n";
  for (int a = 0; a < c.num_arrows(); ++a) {
    if (c.is_identity(a)) continue;
    os << "arrow " << c.arrow_name(a) << " : " << c.object_name(c.src(a)) << " -> " << c.object_name(c.tgt(a))
       << "  # " << arrow_text(sc, a) << (sc.arrows[a].generating ? " generating" : "")
       << (sc.arrows[a].representable ? " representable" : "") << "\n";
  }
  for (int g = 0; g < c.num_arrows(); ++g)
    for (int f = 0; f < c.num_arrows(); ++f) {
      if (c.tgt(f) != c.src(g) || c.is_identity(g) || c.is_identity(f)) continue;
      os << "compose " << c.arrow_name(g) << " " << c.arrow_name(f) << " = " << c.arrow_name(c.compose(g, f)) << "\n";
    }
  return os.str();
}

}  // namespace rmk::syncat
