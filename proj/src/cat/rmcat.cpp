#include "rmk/cat/rmcat.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <tuple>

namespace rmk::cat {

namespace {

std::string name_of(const FinCat& c, Arr f) { return c.arrow_name(f); }

Diagram cospan(const FinCat& c, Arr f, Arr g) {
  Diagram d;
  d.nodes = {c.src(f), c.src(g), c.tgt(f)};
  d.edges = {{0, 2, f}, {1, 2, g}};
  return d;
}

Cone full_cone(const FinCat& c, Arr f, Arr p1, Arr p2) { return Cone{c.src(p1), {p1, p2, c.compose(f, p1)}}; }

// The unique arrow into a pullback (p1, p2) of (f, g) from a cone (q1, q2).
std::optional<Arr> pair_into(const FinCat& c, Arr f, const Cone& pb, Arr q1, Arr q2) {
  auto ms = factorizations(c, full_cone(c, f, q1, q2), full_cone(c, f, pb.legs[0], pb.legs[1]));
  if (ms.size() != 1) return std::nullopt;
  return ms[0];
}

std::vector<Arr> arrows_into(const FinCat& c, Obj y) {
  std::vector<Arr> out;
  for (Arr k = 0; k < c.num_arrows(); ++k)
    if (c.tgt(k) == y) out.push_back(k);
  return out;
}

}  // namespace

Cartesian cartesian_structure(const CatRef& cref) {
  const FinCat& c = *cref;
  Cartesian out;
  out.cat = cref;
  auto t = terminal_object(c);
  if (!t) throw LawError(LawKind::NotCartesian, c.name() + " has no terminal object");
  out.terminal = *t;
  for (Arr f = 0; f < c.num_arrows(); ++f)
    for (Arr g = 0; g < c.num_arrows(); ++g) {
      if (c.tgt(f) != c.tgt(g)) continue;
      auto p = pullback(c, f, g);
      if (!p)
        throw LawError(LawKind::NotCartesian,
                       "no pullback of " + name_of(c, f) + " and " + name_of(c, g) + " in " + c.name(),
                       {name_of(c, f), name_of(c, g)});
      out.pullbacks.emplace(std::make_pair(f, g), *p);
    }
  return out;
}

bool pushforward_ump(const Cartesian& cart, Arr f, Arr g, const PushforwardWitness& w, std::string* why) {
  const FinCat& c = *cart.cat;
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  Obj y = c.tgt(f);
  if (w.h == kNone || c.tgt(w.h) != y) return fail("witness is not an arrow into " + c.object_name(y));
  const Cone& p = cart.pullback(f, w.h);
  if (w.eval == kNone || c.src(w.eval) != p.apex || c.tgt(w.eval) != c.src(g))
    return fail("evaluation has the wrong endpoints");
  if (c.compose(g, w.eval) != p.legs[0]) return fail("evaluation is not over " + c.object_name(c.src(f)));
  for (Arr k : arrows_into(c, y)) {
    const Cone& q = cart.pullback(f, k);
    // Hom over Y (k, h) -> Hom over X (f^*k, g) by m |-> eval ∘ f^*m.
    std::set<Arr> image;
    size_t lhs = 0;
    for (Arr m : c.hom(c.src(k), c.src(w.h))) {
      if (c.compose(w.h, m) != k) continue;
      ++lhs;
      auto t = pair_into(c, f, p, q.legs[0], c.compose(m, q.legs[1]));
      if (!t) return fail("no comparison into the pullback along " + name_of(c, w.h));
      image.insert(c.compose(w.eval, *t));
    }
    size_t rhs = 0;
    for (Arr n : c.hom(q.apex, c.src(g)))
      if (c.compose(g, n) == q.legs[0]) ++rhs;
    if (image.size() != lhs || lhs != rhs)
      return fail("transposition is not bijective at " + name_of(c, k) + " (" + std::to_string(lhs) + " vs " +
                  std::to_string(rhs) + ")");
  }
  return true;
}

std::optional<PushforwardWitness> find_pushforward(const Cartesian& cart, Arr f, Arr g) {
  const FinCat& c = *cart.cat;
  for (Arr h : arrows_into(c, c.tgt(f))) {
    const Cone& p = cart.pullback(f, h);
    for (Arr e : c.hom(p.apex, c.src(g))) {
      if (c.compose(g, e) != p.legs[0]) continue;
      PushforwardWitness w{h, e};
      if (pushforward_ump(cart, f, g, w)) return w;
    }
  }
  return std::nullopt;
}

bool is_exponentiable(const Cartesian& cart, Arr f) {
  const FinCat& c = *cart.cat;
  for (Arr g : arrows_into(c, c.src(f)))
    if (!find_pushforward(cart, f, g)) return false;
  return true;
}

std::vector<Arr> RMCat::representables() const {
  std::vector<Arr> out;
  for (Arr f = 0; f < static_cast<Arr>(representable.size()); ++f)
    if (representable[f]) out.push_back(f);
  return out;
}

bool pullback_stable(const Cartesian& cart, const std::vector<bool>& cls, std::string* why) {
  const FinCat& c = *cart.cat;
  for (Arr f = 0; f < c.num_arrows(); ++f) {
    if (!cls[f]) continue;
    for (Arr k : arrows_into(c, c.tgt(f))) {
      Diagram d = cospan(c, f, k);
      for (const auto& cone : all_cones(c, d)) {
        if (cls[cone.legs[1]] || !is_limit(c, d, cone)) continue;
        if (why)
          *why = "pullback " + name_of(c, cone.legs[1]) + " of " + name_of(c, f) + " along " + name_of(c, k) +
                 " is not representable";
        return false;
      }
    }
  }
  return true;
}

RMCat validate_rmcat(const CatRef& cref, const std::vector<bool>& representable,
                     const std::map<std::pair<Arr, Arr>, PushforwardWitness>& given) {
  const FinCat& c = *cref;
  validate(c);
  if (static_cast<int>(representable.size()) != c.num_arrows())
    throw LawError(LawKind::Malformed, "representable flags do not match the arrows");
  RMCat out;
  out.cart = cartesian_structure(cref);
  out.representable = representable;

  for (Obj a = 0; a < c.num_objects(); ++a)
    if (!representable[c.id(a)])
      throw LawError(LawKind::ClassNotClosed, "identity " + name_of(c, c.id(a)) + " is not representable",
                     {name_of(c, c.id(a))});
  for (Arr f = 0; f < c.num_arrows(); ++f)
    for (Arr g = 0; g < c.num_arrows(); ++g)
      if (representable[f] && representable[g] && c.tgt(f) == c.src(g) && !representable[c.compose(g, f)])
        throw LawError(LawKind::ClassNotClosed,
                       name_of(c, g) + " . " + name_of(c, f) + " = " + name_of(c, c.compose(g, f)) +
                           " is not representable",
                       {name_of(c, f), name_of(c, g)});
  for (Arr f = 0; f < c.num_arrows(); ++f) {
    if (!representable[f]) continue;
    for (Arr k : arrows_into(c, c.tgt(f))) {
      Diagram d = cospan(c, f, k);
      for (const auto& cone : all_cones(c, d)) {
        if (representable[cone.legs[1]] || !is_limit(c, d, cone)) continue;
        throw LawError(LawKind::NotStable,
                       "pullback " + name_of(c, cone.legs[1]) + " of " + name_of(c, f) + " along " + name_of(c, k) +
                           " is not representable",
                       {name_of(c, f), name_of(c, k), name_of(c, cone.legs[0]), name_of(c, cone.legs[1])});
      }
    }
  }

  for (const auto& [key, w] : given) {
    auto [f, g] = key;
    if (f < 0 || g < 0 || f >= c.num_arrows() || g >= c.num_arrows() || !representable[f] || c.tgt(g) != c.src(f))
      throw LawError(LawKind::Malformed, "pushforward entry for a non-representable arrow or a non-composable pair");
    std::string why;
    if (!pushforward_ump(out.cart, f, g, w, &why))
      throw LawError(LawKind::PushforwardUMPFails,
                     "pushforward of " + name_of(c, g) + " along " + name_of(c, f) + ": " + why,
                     {name_of(c, f), name_of(c, g), w.h == kNone ? "?" : name_of(c, w.h)});
    out.pushforwards[key] = w;
  }
  for (Arr f = 0; f < c.num_arrows(); ++f) {
    if (!representable[f]) continue;
    for (Arr g : arrows_into(c, c.src(f))) {
      if (out.pushforwards.count({f, g})) continue;
      auto w = find_pushforward(out.cart, f, g);
      if (!w)
        throw LawError(LawKind::NotExponentiable,
                       name_of(c, f) + " has no pushforward of " + name_of(c, g), {name_of(c, f), name_of(c, g)});
      out.pushforwards[{f, g}] = *w;
    }
  }
  return out;
}

std::vector<bool> isomorphisms(const FinCat& c) {
  std::vector<bool> out(c.num_arrows());
  for (Arr f = 0; f < c.num_arrows(); ++f) out[f] = c.is_iso(f);
  return out;
}

std::vector<bool> all_arrows(const FinCat& c) { return std::vector<bool>(c.num_arrows(), true); }

std::vector<bool> generate_stable_class(const CatRef& cref, const std::vector<Arr>& generators) {
  const FinCat& c = *cref;
  Cartesian cart = cartesian_structure(cref);
  std::vector<bool> cls(c.num_arrows());
  for (Obj a = 0; a < c.num_objects(); ++a) cls[c.id(a)] = true;
  for (Arr g : generators) {
    if (!is_exponentiable(cart, g))
      throw LawError(LawKind::NotExponentiable, name_of(c, g) + " is not exponentiable", {name_of(c, g)});
    cls[g] = true;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (Arr f = 0; f < c.num_arrows(); ++f) {
      if (!cls[f]) continue;
      for (Arr g = 0; g < c.num_arrows(); ++g)
        if (cls[g] && c.tgt(f) == c.src(g) && !cls[c.compose(g, f)]) cls[c.compose(g, f)] = changed = true;
      for (Arr k : arrows_into(c, c.tgt(f))) {
        Diagram d = cospan(c, f, k);
        for (const auto& cone : all_cones(c, d))
          if (!cls[cone.legs[1]] && is_limit(c, d, cone)) cls[cone.legs[1]] = changed = true;
      }
    }
  }
  return cls;
}

SliceRM slice_rmcat(const RMCat& rc, Obj x) {
  const FinCat& c = rc.cat();
  auto s = slice(rc.cat_ref(), x);
  CatRef sc = s.inclusion.src;
  std::vector<bool> rep(sc->num_arrows());
  for (Arr a = 0; a < sc->num_arrows(); ++a) rep[a] = rc.representable[s.inclusion.arr(a)];
  SliceRM out{validate_rmcat(sc, rep), s.inclusion, std::vector<Obj>(c.num_arrows(), kNone)};
  Obj i = 0;
  for (Arr f = 0; f < c.num_arrows(); ++f)
    if (c.tgt(f) == x) out.object_of_arrow[f] = i++;
  return out;
}

void check_rm_functor(const RMCat& c, const RMCat& d, const Functor& F) {
  validate(F);
  const FinCat& cc = c.cat();
  const FinCat& dc = d.cat();
  if (F.src->num_arrows() != cc.num_arrows() || F.tgt->num_arrows() != dc.num_arrows())
    throw LawError(LawKind::Malformed, "functor endpoints do not match the categories");
  if (!is_terminal(dc, F(c.terminal())))
    throw LawError(LawKind::NotRMFunctor, "terminal object " + cc.object_name(c.terminal()) + " is not preserved",
                   {cc.object_name(c.terminal())});
  for (const auto& [key, cone] : c.cart.pullbacks) {
    auto [f, g] = key;
    if (!is_pullback(dc, F.arr(f), F.arr(g), F.arr(cone.legs[0]), F.arr(cone.legs[1])))
      throw LawError(LawKind::NotRMFunctor,
                     "pullback of " + name_of(cc, f) + " and " + name_of(cc, g) + " is not preserved",
                     {name_of(cc, f), name_of(cc, g)});
  }
  for (Arr f = 0; f < cc.num_arrows(); ++f)
    if (c.representable[f] && !d.representable[F.arr(f)])
      throw LawError(LawKind::NotRMFunctor, "representable " + name_of(cc, f) + " goes to a non-representable arrow",
                     {name_of(cc, f)});
  for (const auto& [key, w] : c.pushforwards) {
    auto [f, g] = key;
    Arr ff = F.arr(f), fg = F.arr(g), fh = F.arr(w.h);
    const PushforwardWitness& dw = d.pushforwards.at({ff, fg});
    const Cone& p = c.cart.pullback(f, w.h);
    const Cone& dp = d.cart.pullback(ff, dw.h);
    // The comparison F(f_* g) -> (Ff)_*(Fg) is the transpose of F(eval).
    std::optional<Arr> cmp;
    for (Arr m : dc.hom(dc.src(fh), dc.src(dw.h))) {
      if (dc.compose(dw.h, m) != fh) continue;
      auto t = pair_into(dc, ff, dp, F.arr(p.legs[0]), dc.compose(m, F.arr(p.legs[1])));
      if (t && dc.compose(dw.eval, *t) == F.arr(w.eval)) {
        cmp = m;
        break;
      }
    }
    if (!cmp || !dc.is_iso(*cmp))
      throw LawError(LawKind::NotRMFunctor,
                     "pushforward of " + name_of(cc, g) + " along " + name_of(cc, f) + " is not preserved",
                     {name_of(cc, f), name_of(cc, g)});
  }
}

bool is_rm_functor(const RMCat& c, const RMCat& d, const Functor& f) {
  try {
    check_rm_functor(c, d, f);
    return true;
  } catch (const LawError&) {
    return false;
  }
}

namespace {

// All natural isomorphisms a => b, as component vectors.
std::vector<std::vector<Arr>> natural_isos(const Functor& a, const Functor& b, size_t cap = 10000) {
  const FinCat& c = *a.src;
  const FinCat& d = *a.tgt;
  std::vector<std::vector<Arr>> out;
  std::vector<Arr> comp(c.num_objects(), kNone);
  std::function<void(Obj)> go = [&](Obj x) {
    if (out.size() >= cap) throw Overflow("more than " + std::to_string(cap) + " natural isomorphisms");
    if (x == c.num_objects()) {
      out.push_back(comp);
      return;
    }
    for (Arr m : d.hom(a(x), b(x))) {
      if (!d.is_iso(m)) continue;
      comp[x] = m;
      bool ok = true;
      for (Arr f = 0; f < c.num_arrows() && ok; ++f) {
        Obj s = c.src(f), t = c.tgt(f);
        if (s > x || t > x) continue;
        ok = d.compose(comp[t], a.arr(f)) == d.compose(b.arr(f), comp[s]);
      }
      if (ok) go(x + 1);
    }
    comp[x] = kNone;
  };
  go(0);
  return out;
}

// X^* : C -> C/X on objects and arrows.
struct Reindex {
  std::vector<Obj> obj;
  std::vector<Arr> arr;
};

Reindex reindex_functor(const RMCat& rc, const SliceRM& s, Obj x) {
  const FinCat& c = rc.cat();
  const FinCat& sc = s.rm.cat();
  Obj one = rc.terminal();
  auto bang = [&](Obj a) { return c.hom(a, one).front(); };
  Reindex r;
  std::vector<Cone> prod;
  for (Obj a = 0; a < c.num_objects(); ++a) {
    prod.push_back(rc.cart.pullback(bang(a), bang(x)));
    r.obj.push_back(s.object_of_arrow[prod.back().legs[1]]);
  }
  for (Arr m = 0; m < c.num_arrows(); ++m) {
    Obj a = c.src(m), b = c.tgt(m);
    auto t = pair_into(c, bang(b), prod[b], c.compose(m, prod[a].legs[0]), prod[a].legs[1]);
    Arr found = kNone;
    for (Arr u : sc.hom(r.obj[a], r.obj[b]))
      if (s.projection.arr(u) == *t) found = u;
    r.arr.push_back(found);
  }
  return r;
}

}  // namespace

SectionExtension adjoin_section_check(const RMCat& rc, Obj x, const RMCat& rd, const Functor& F, Arr s) {
  const FinCat& c = rc.cat();
  const FinCat& d = rd.cat();
  check_rm_functor(rc, rd, F);
  if (d.src(s) != rd.terminal() || d.tgt(s) != F(x))
    throw LawError(LawKind::Malformed, "section is not an arrow 1 -> F X");
  SectionExtension out{slice_rmcat(rc, x), {}, 0, false};
  const SliceRM& sl = out.slice;
  const FinCat& sc = sl.rm.cat();
  const CatRef& scref = sl.rm.cat_ref();

  // Canonical form: E(k : A -> X) is the pullback of F k along s.
  Functor E{scref, rd.cat_ref(), {}, {}};
  std::vector<Cone> pb;
  std::vector<Arr> arrow_of(sc.num_objects(), kNone);
  for (Arr f = 0; f < c.num_arrows(); ++f)
    if (sl.object_of_arrow[f] != kNone) arrow_of[sl.object_of_arrow[f]] = f;
  for (Obj k = 0; k < sc.num_objects(); ++k) {
    pb.push_back(rd.cart.pullback(F.arr(arrow_of[k]), s));
    E.on_obj.push_back(pb.back().apex);
  }
  for (Arr m = 0; m < sc.num_arrows(); ++m) {
    Obj a = sc.src(m), b = sc.tgt(m);
    auto t = pair_into(d, F.arr(arrow_of[b]), pb[b], d.compose(F.arr(sl.projection.arr(m)), pb[a].legs[0]),
                       pb[a].legs[1]);
    if (!t) throw LawError(LawKind::NotRMFunctor, "canonical extension is undefined on " + sc.arrow_name(m));
    E.on_arr.push_back(*t);
  }
  check_rm_functor(sl.rm, rd, E);
  out.extension = E;

  Reindex xs = reindex_functor(rc, sl, x);
  Functor xstar{rc.cat_ref(), scref, xs.obj, xs.arr};
  // Generic section: the diagonal id_X -> X^*X.
  Obj top = sl.object_of_arrow[c.id(x)];
  Obj xx = xs.obj[x];
  Arr diag = kNone;
  for (Arr u : sc.hom(top, xx)) diag = u;
  if (diag == kNone) throw LawError(LawKind::Malformed, "no diagonal in the slice");

  // A candidate is an RM functor E' with a natural iso φ : E'X^* ≅ F such
  // that φ_X ∘ E'(δ) = s ∘ !.
  auto compatible = [&](const Functor& e, std::vector<Arr>* phi_out) {
    Obj src = e(top);
    if (!is_terminal(d, src)) return false;
    for (const auto& phi : natural_isos(compose(e, xstar), F)) {
      if (d.compose(phi[x], e.arr(diag)) == d.compose(s, d.hom(src, rd.terminal()).front())) {
        if (phi_out) *phi_out = phi;
        return true;
      }
    }
    return false;
  };
  if (!compatible(E, nullptr))
    throw LawError(LawKind::NotRMFunctor, "canonical extension does not restrict to F or misses the section");

  std::vector<std::pair<Functor, std::vector<Arr>>> cands;
  for (const auto& e : all_functors(scref, rd.cat_ref())) {
    if (!is_rm_functor(sl.rm, rd, e)) continue;
    std::vector<Arr> phi;
    if (compatible(e, &phi)) cands.emplace_back(e, phi);
  }
  out.candidates = cands.size();
  out.unique_up_to_iso = !cands.empty();
  for (size_t i = 0; i < cands.size() && out.unique_up_to_iso; ++i)
    for (size_t j = 0; j < cands.size() && out.unique_up_to_iso; ++j) {
      size_t n = 0;
      for (const auto& psi : natural_isos(cands[i].first, cands[j].first)) {
        bool ok = true;
        for (Obj a = 0; a < c.num_objects() && ok; ++a)
          ok = d.compose(cands[j].second[a], psi[xs.obj[a]]) == cands[i].second[a];
        if (ok) ++n;
      }
      out.unique_up_to_iso = n == 1;
    }
  return out;
}

Theory constant_theory(const RMCatRef& t) {
  Theory th{t, {}, {}};
  const FinCat& c = t->cat();
  th.sets.assign(c.num_objects(), {"*"});
  th.maps.assign(c.num_arrows(), {0});
  return th;
}

Theory hom_theory(const RMCatRef& t, Obj x) {
  Theory th{t, {}, {}};
  const FinCat& c = t->cat();
  for (Obj a = 0; a < c.num_objects(); ++a) {
    th.sets.emplace_back();
    for (Arr k : c.hom(x, a)) th.sets.back().push_back(c.arrow_name(k));
  }
  for (Arr f = 0; f < c.num_arrows(); ++f) {
    th.maps.emplace_back();
    const auto& from = c.hom(x, c.src(f));
    const auto& to = c.hom(x, c.tgt(f));
    for (Arr k : from)
      th.maps.back().push_back(
          static_cast<int>(std::find(to.begin(), to.end(), c.compose(f, k)) - to.begin()));
  }
  return th;
}

namespace {

void check_functorial(const Theory& th) {
  const FinCat& c = th.T->cat();
  if (static_cast<int>(th.sets.size()) != c.num_objects() || static_cast<int>(th.maps.size()) != c.num_arrows())
    throw LawError(LawKind::Malformed, "theory does not cover every object and arrow");
  for (Arr f = 0; f < c.num_arrows(); ++f) {
    const auto& m = th.maps[f];
    if (m.size() != th.sets[c.src(f)].size())
      throw LawError(LawKind::Malformed, "map of " + c.arrow_name(f) + " has the wrong domain", {c.arrow_name(f)});
    for (int v : m)
      if (v < 0 || v >= static_cast<int>(th.sets[c.tgt(f)].size()))
        throw LawError(LawKind::Malformed, "map of " + c.arrow_name(f) + " leaves its codomain", {c.arrow_name(f)});
  }
  for (Obj a = 0; a < c.num_objects(); ++a) {
    const auto& m = th.maps[c.id(a)];
    for (int i = 0; i < static_cast<int>(m.size()); ++i)
      if (m[i] != i)
        throw LawError(LawKind::NotFunctorial, "identity of " + c.object_name(a) + " is not sent to the identity",
                       {c.arrow_name(c.id(a))});
  }
  for (Arr f = 0; f < c.num_arrows(); ++f)
    for (Arr g = 0; g < c.num_arrows(); ++g) {
      if (c.tgt(f) != c.src(g)) continue;
      const auto& h = th.maps[c.compose(g, f)];
      for (size_t i = 0; i < h.size(); ++i)
        if (h[i] != th.maps[g][th.maps[f][i]])
          throw LawError(LawKind::NotFunctorial, c.arrow_name(g) + " . " + c.arrow_name(f) + " is not preserved",
                         {c.arrow_name(f), c.arrow_name(g)});
    }
}

}  // namespace

FinCat elements_category(const Theory& th) {
  const FinCat& c = th.T->cat();
  std::vector<int> off(c.num_objects() + 1, 0);
  for (Obj a = 0; a < c.num_objects(); ++a) off[a + 1] = off[a] + static_cast<int>(th.sets[a].size());
  std::vector<std::string> objects;
  for (Obj a = 0; a < c.num_objects(); ++a)
    for (const auto& e : th.sets[a]) objects.push_back(c.object_name(a) + ":" + e);
  std::vector<Arrow> arrows;
  std::vector<std::vector<Arr>> index(c.num_arrows());
  for (Arr f = 0; f < c.num_arrows(); ++f)
    for (int i = 0; i < static_cast<int>(th.sets[c.src(f)].size()); ++i) {
      index[f].push_back(static_cast<Arr>(arrows.size()));
      arrows.push_back({c.arrow_name(f) + "@" + th.sets[c.src(f)][i], off[c.src(f)] + i,
                        off[c.tgt(f)] + th.maps[f][i]});
    }
  std::vector<Arr> ids;
  for (Obj a = 0; a < c.num_objects(); ++a)
    for (int i = 0; i < static_cast<int>(th.sets[a].size()); ++i) ids.push_back(index[c.id(a)][i]);
  size_t n = arrows.size();
  std::vector<Arr> table(n * n, kNone);
  for (Arr f = 0; f < c.num_arrows(); ++f)
    for (Arr g = 0; g < c.num_arrows(); ++g) {
      if (c.tgt(f) != c.src(g)) continue;
      for (int i = 0; i < static_cast<int>(index[f].size()); ++i)
        table[static_cast<size_t>(index[g][th.maps[f][i]]) * n + index[f][i]] = index[c.compose(g, f)][i];
    }
  return FinCat("el(" + c.name() + ")", std::move(objects), std::move(arrows), std::move(ids), std::move(table));
}

bool elements_cofiltered(const Theory& th, std::string* why) {
  check_functorial(th);
  FinCat el = elements_category(th);
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (el.num_objects() == 0) return fail("category of elements is empty");
  for (Obj p = 0; p < el.num_objects(); ++p)
    for (Obj q = 0; q < el.num_objects(); ++q) {
      bool cone = false;
      for (Obj r = 0; r < el.num_objects() && !cone; ++r) cone = !el.hom(r, p).empty() && !el.hom(r, q).empty();
      if (!cone) return fail("no element maps to both " + el.object_name(p) + " and " + el.object_name(q));
    }
  for (Obj p = 0; p < el.num_objects(); ++p)
    for (Obj q = 0; q < el.num_objects(); ++q)
      for (Arr u : el.hom(p, q))
        for (Arr v : el.hom(p, q)) {
          if (u >= v) continue;
          bool eq = false;
          for (Obj r = 0; r < el.num_objects() && !eq; ++r)
            for (Arr w : el.hom(r, p))
              if (el.compose(u, w) == el.compose(v, w)) {
                eq = true;
                break;
              }
          if (!eq) return fail("parallel pair " + el.arrow_name(u) + ", " + el.arrow_name(v) + " is not equalized");
        }
  return true;
}

bool preserves_designated_limits(const Theory& th, std::string* why) {
  check_functorial(th);
  const RMCat& t = *th.T;
  const FinCat& c = t.cat();
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (th.sets[t.terminal()].size() != 1)
    return fail("terminal " + c.object_name(t.terminal()) + " has " + std::to_string(th.sets[t.terminal()].size()) +
                " elements");
  for (const auto& [key, cone] : t.cart.pullbacks) {
    auto [f, g] = key;
    std::set<std::pair<int, int>> image;
    for (size_t i = 0; i < th.sets[cone.apex].size(); ++i)
      image.emplace(th.maps[cone.legs[0]][i], th.maps[cone.legs[1]][i]);
    size_t expect = 0;
    for (size_t a = 0; a < th.sets[c.src(f)].size(); ++a)
      for (size_t b = 0; b < th.sets[c.src(g)].size(); ++b)
        if (th.maps[f][a] == th.maps[g][b]) ++expect;
    if (image.size() != th.sets[cone.apex].size() || image.size() != expect)
      return fail("pullback cone of " + c.arrow_name(f) + " and " + c.arrow_name(g) + " at " +
                  c.object_name(cone.apex) + " is not preserved");
  }
  return true;
}

void validate_theory(const Theory& th) {
  check_functorial(th);
  std::string by_cones, by_elements;
  bool a = preserves_designated_limits(th, &by_cones);
  bool b = elements_cofiltered(th, &by_elements);
  if (a != b)
    throw std::logic_error("cartesianness checks disagree: cones " + std::string(a ? "pass" : by_cones) +
                           ", elements " + (b ? "pass" : by_elements));
  if (!a) throw LawError(LawKind::NotCartesian, by_cones + "; " + by_elements);
}

std::vector<DFibRef> all_dfibs(const CatRef& base, int bound, size_t cap) {
  const FinCat& b = *base;
  int n = b.num_objects();
  std::vector<DFibRef> out;
  size_t labelled = 0;
  std::vector<int> size(n, 0);
  std::vector<Arr> free_arrows;
  for (Arr f = 0; f < b.num_arrows(); ++f)
    if (!b.is_identity(f)) free_arrows.push_back(f);

  auto fill_tables = [&]() {
    std::vector<std::vector<int>> r(b.num_arrows());
    for (Arr f = 0; f < b.num_arrows(); ++f) {
      r[f].assign(size[b.tgt(f)], -1);
      if (b.is_identity(f)) std::iota(r[f].begin(), r[f].end(), 0);
    }
    std::vector<std::pair<Arr, int>> vars;
    for (Arr f : free_arrows)
      for (int e = 0; e < size[b.tgt(f)]; ++e) vars.emplace_back(f, e);
    auto consistent = [&]() {
      for (Arr g = 0; g < b.num_arrows(); ++g)
        for (Obj z = 0; z < n; ++z)
          for (Arr f : b.hom(z, b.src(g))) {
            Arr h = b.compose(g, f);
            for (int e = 0; e < size[b.tgt(g)]; ++e) {
              int a = r[g][e];
              if (a < 0) continue;
              int x = r[f][a], y = r[h][e];
              if (x >= 0 && y >= 0 && x != y) return false;
            }
          }
      return true;
    };
    std::function<void(size_t)> go = [&](size_t k) {
      if (k == vars.size()) {
        if (++labelled > cap) throw Overflow("more than " + std::to_string(cap) + " fibrations within the bound");
        std::vector<std::vector<std::string>> fibers(n);
        for (Obj a = 0; a < n; ++a)
          for (int i = 0; i < size[a]; ++i) fibers[a].push_back(b.object_name(a) + "." + std::to_string(i));
        auto d = std::make_shared<const DFib>(base, "F" + std::to_string(out.size()), std::move(fibers), r);
        for (const auto& o : out)
          if (find_isomorphism(o, d)) return;
        out.push_back(d);
        return;
      }
      auto [f, e] = vars[k];
      for (int v = 0; v < size[b.src(f)]; ++v) {
        r[f][e] = v;
        if (consistent()) go(k + 1);
      }
      r[f][e] = -1;
    };
    go(0);
  };
  std::function<void(int)> sizes = [&](int a) {
    if (a == n) {
      fill_tables();
      return;
    }
    for (int s = 0; s <= bound; ++s) {
      size[a] = s;
      sizes(a + 1);
    }
  };
  sizes(0);
  return out;
}

BoundedDFibRM dfib_rmcat(const CatRef& base, int bound, size_t cap) {
  BoundedDFibRM m;
  m.base = base;
  m.bound = bound;
  m.objects = all_dfibs(base, bound, cap);
  int n = static_cast<int>(m.objects.size());
  std::map<std::tuple<int, int, std::vector<std::vector<int>>>, Arr> index;
  std::vector<Arrow> arrows;
  std::vector<int> obj_of;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (auto& f : all_maps(m.objects[i], m.objects[j], cap)) {
        if (m.arrows.size() >= cap) throw Overflow("more than " + std::to_string(cap) + " maps within the bound");
        Arr k = static_cast<Arr>(m.arrows.size());
        index[{i, j, f.fn}] = k;
        arrows.push_back({"m" + std::to_string(k), i, j});
        m.arrows.push_back(std::move(f));
      }
  std::vector<std::string> names;
  std::vector<Arr> ids;
  for (int i = 0; i < n; ++i) {
    names.push_back(m.objects[i]->name());
    ids.push_back(index.at({i, i, identity_map(m.objects[i]).fn}));
  }
  size_t na = arrows.size();
  std::vector<Arr> table(na * na, kNone);
  for (Arr f = 0; f < static_cast<Arr>(na); ++f)
    for (Arr g = 0; g < static_cast<Arr>(na); ++g)
      if (arrows[f].tgt == arrows[g].src)
        table[static_cast<size_t>(g) * na + f] =
            index.at({arrows[f].src, arrows[g].tgt, compose(m.arrows[g], m.arrows[f]).fn});
  m.cat = std::make_shared<const FinCat>("DFib(" + base->name() + ")<=" + std::to_string(bound), std::move(names),
                                         std::move(arrows), std::move(ids), std::move(table));
  for (const auto& f : m.arrows) m.representable.push_back(is_representable(f));
  return m;
}

AxiomReport validate_bounded(const BoundedDFibRM& m) {
  AxiomReport r;
  const FinCat& c = *m.cat;
  auto check = [&](bool ok, const std::string& what) {
    ++r.checks;
    if (!ok) r.failures.push_back(what);
  };
  for (Obj a = 0; a < c.num_objects(); ++a)
    check(m.representable[c.id(a)], "identity of " + c.object_name(a) + " is not representable");
  for (Arr f = 0; f < c.num_arrows(); ++f) {
    if (!m.representable[f]) continue;
    for (Arr g = 0; g < c.num_arrows(); ++g)
      if (m.representable[g] && c.src(g) == c.tgt(f))
        check(m.representable[c.compose(g, f)], c.arrow_name(g) + " . " + c.arrow_name(f) + " is not representable");
    auto ra = right_adjoint(m.arrows[f]);
    for (Arr k = 0; k < c.num_arrows(); ++k) {
      if (c.tgt(k) != c.tgt(f)) continue;
      auto pb = pullback(m.arrows[f], m.arrows[k]);
      check(is_representable(pb.p2), "pullback of " + c.arrow_name(f) + " along " + c.arrow_name(k) +
                                         " is not representable");
    }
    for (Arr g = 0; g < c.num_arrows(); ++g) {
      if (c.tgt(g) != c.src(f)) continue;
      auto pf = pushforward(m.arrows[f], *ra, m.arrows[g]);
      for (Arr w = 0; w < c.num_arrows(); ++w) {
        if (c.tgt(w) != c.tgt(f)) continue;
        auto u = pushforward_ump(m.arrows[f], m.arrows[g], pf, m.arrows[w]);
        check(u.lhs == u.rhs, "pushforward of " + c.arrow_name(g) + " along " + c.arrow_name(f) +
                                  " fails against " + c.arrow_name(w));
      }
    }
  }
  return r;
}

}  // namespace rmk::cat
