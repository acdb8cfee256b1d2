#include "rmk/cat/model.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace rmk::cat {

namespace {

const std::string& tname(const Model& m, Arr f) { return m.T->cat().arrow_name(f); }

std::string elem_name(const DFib& d, Elem e) {
  return d.element_name(e.obj, e.idx) + " over " + d.base()->object_name(e.obj);
}

DFib renamed(const DFib& d, const std::string& name) {
  std::vector<std::vector<std::string>> fs;
  for (Obj o = 0; o < d.base()->num_objects(); ++o) fs.push_back(d.fiber(o));
  return DFib(d.base(), name, std::move(fs), d.restrictions());
}

[[noreturn]] void not_rm(const std::string& msg, std::vector<std::string> w) {
  throw LawError(LawKind::NotRMFunctor, msg, std::move(w));
}

}  // namespace

std::vector<DFibMap> complete_arrows(const RMCat& t, const std::vector<DFibRef>& obj,
                                     std::vector<std::optional<DFibMap>> given) {
  const FinCat& c = t.cat();
  given.resize(c.num_arrows());
  for (Obj a = 0; a < c.num_objects(); ++a)
    if (!given[c.id(a)]) given[c.id(a)] = identity_map(obj[a]);
  for (bool changed = true; changed;) {
    changed = false;
    for (Arr f = 0; f < c.num_arrows(); ++f)
      for (Arr g = 0; g < c.num_arrows(); ++g)
        if (c.tgt(f) == c.src(g) && given[f] && given[g] && !given[c.compose(g, f)]) {
          given[c.compose(g, f)] = compose(*given[g], *given[f]);
          changed = true;
        }
  }
  std::vector<DFibMap> out;
  for (Arr f = 0; f < c.num_arrows(); ++f) {
    if (!given[f]) throw LawError(LawKind::Malformed, "no map given for " + c.arrow_name(f), {c.arrow_name(f)});
    out.push_back(*given[f]);
  }
  return out;
}

void check_model(const Model& m) {
  const RMCat& t = *m.T;
  const FinCat& tc = t.cat();
  const FinCat& b = *m.base;
  if (!is_terminal(b, m.terminal)) {
    if (!terminal_object(b)) throw LawError(LawKind::NoTerminal, "base " + b.name() + " has no terminal object");
    throw LawError(LawKind::NoTerminal, "designated terminal " + b.object_name(m.terminal) + " is not terminal");
  }
  if (static_cast<int>(m.obj.size()) != tc.num_objects() || static_cast<int>(m.arr.size()) != tc.num_arrows())
    throw LawError(LawKind::Malformed, "model does not cover every object and arrow of " + tc.name());
  for (Obj a = 0; a < tc.num_objects(); ++a) {
    if (m.obj[a]->base() != m.base)
      throw LawError(LawKind::Malformed, "fibration of " + tc.object_name(a) + " lies over another base");
    validate(*m.obj[a]);
  }
  for (Arr f = 0; f < tc.num_arrows(); ++f) {
    const DFibMap& u = m.arr[f];
    if (u.src != m.obj[tc.src(f)] || u.tgt != m.obj[tc.tgt(f)] || !over_identity(u))
      throw LawError(LawKind::Malformed, "map of " + tc.arrow_name(f) + " has the wrong endpoints", {tname(m, f)});
    validate(u);
  }
  for (Obj a = 0; a < tc.num_objects(); ++a)
    if (m.arr[tc.id(a)].fn != identity_map(m.obj[a]).fn)
      not_rm("identity of " + tc.object_name(a) + " is not sent to an identity", {tname(m, tc.id(a))});
  for (Arr f = 0; f < tc.num_arrows(); ++f)
    for (Arr g = 0; g < tc.num_arrows(); ++g)
      if (tc.tgt(f) == tc.src(g) && compose(m.arr[g], m.arr[f]).fn != m.arr[tc.compose(g, f)].fn)
        not_rm(tc.arrow_name(g) + " . " + tc.arrow_name(f) + " is not preserved", {tname(m, f), tname(m, g)});

  const DFib& one = *m.obj[t.terminal()];
  for (Obj o = 0; o < b.num_objects(); ++o)
    if (one.fiber_size(o) != 1)
      not_rm("terminal object " + tc.object_name(t.terminal()) + " has " + std::to_string(one.fiber_size(o)) +
                 " elements over " + b.object_name(o),
             {tc.object_name(t.terminal())});
  for (const auto& [key, cone] : t.cart.pullbacks) {
    auto [f, g] = key;
    Square s{m.arr[cone.legs[0]], m.arr[cone.legs[1]], m.arr[f], m.arr[g]};
    if (!is_pullback_square(s))
      not_rm("pullback of " + tc.arrow_name(f) + " and " + tc.arrow_name(g) + " at " + tc.object_name(cone.apex) +
                 " is not preserved",
             {tname(m, f), tname(m, g), tc.object_name(cone.apex)});
  }
  for (Arr f = 0; f < tc.num_arrows(); ++f) {
    if (!t.representable[f]) continue;
    Elem bad;
    if (!right_adjoint(m.arr[f], &bad))
      not_rm("representable " + tc.arrow_name(f) + " goes to a map without right adjoint at " +
                 elem_name(*m.obj[tc.tgt(f)], bad),
             {tname(m, f), m.obj[tc.tgt(f)]->element_name(bad.obj, bad.idx)});
  }
  for (const auto& [key, w] : t.pushforwards) {
    auto [f, g] = key;
    const DFibMap& u = m.arr[f];
    auto ra = *right_adjoint(u);
    Pushforward pf = pushforward(u, ra, m.arr[g]);
    const Cone& p = t.cart.pullback(f, w.h);
    const DFib& W = *m.obj[tc.src(w.h)];
    const DFib& P = *m.obj[p.apex];
    const DFibMap& hm = m.arr[w.h];
    const DFibMap& p1 = m.arr[p.legs[0]];
    const DFibMap& p2 = m.arr[p.legs[1]];
    const DFibMap& ev = m.arr[w.eval];
    std::vector<std::vector<int>> fn(b.num_objects());
    auto fail = [&] {
      not_rm("pushforward of " + tc.arrow_name(g) + " along " + tc.arrow_name(f) + " is not preserved",
             {tname(m, f), tname(m, g)});
    };
    // Transpose of the evaluation: w |-> (h w, eval(G(h w), w · counit)).
    for (Obj o = 0; o < b.num_objects(); ++o)
      for (int wi = 0; wi < W.fiber_size(o); ++wi) {
        int y = hm.fn[o][wi];
        Elem x0 = ra({o, y});
        int wk = W.act(wi, ra.counit[o][y]);
        int pi = -1;
        for (int q = 0; q < P.fiber_size(x0.obj); ++q)
          if (p1.fn[x0.obj][q] == x0.idx && p2.fn[x0.obj][q] == wk) pi = q;
        if (pi < 0) fail();
        std::pair<int, int> key2{y, ev.fn[x0.obj][pi]};
        const auto& dec = pf.decode[o];
        auto it = std::find(dec.begin(), dec.end(), key2);
        if (it == dec.end()) fail();
        fn[o].push_back(static_cast<int>(it - dec.begin()));
      }
    DFibMap cmp = make_map(m.obj[tc.src(w.h)], pf.obj, fn);
    try {
      validate(cmp);
    } catch (const LawError&) {
      fail();
    }
    if (!is_iso(cmp)) fail();
  }
}

Model validate_model(const RMCatRef& t, const CatRef& base, std::vector<DFibRef> obj, std::vector<DFibMap> arr,
                     const std::string& name) {
  auto term = terminal_object(*base);
  if (!term) throw LawError(LawKind::NoTerminal, "base " + base->name() + " has no terminal object");
  Model m{t, base, *term, std::move(obj), std::move(arr), name};
  check_model(m);
  return m;
}

Model yoneda_model(const RMCatRef& t) {
  const FinCat& c = t->cat();
  const CatRef& base = t->cat_ref();
  std::vector<DFibRef> obj;
  for (Obj a = 0; a < c.num_objects(); ++a) {
    obj.push_back(std::make_shared<const DFib>(renamed(yoneda(base, a), c.object_name(a))));
  }
  std::vector<DFibMap> arr;
  for (Arr f = 0; f < c.num_arrows(); ++f) {
    std::vector<std::vector<int>> fn(c.num_objects());
    for (Obj o = 0; o < c.num_objects(); ++o) {
      const auto& to = c.hom(o, c.tgt(f));
      for (Arr k : c.hom(o, c.src(f)))
        fn[o].push_back(static_cast<int>(std::find(to.begin(), to.end(), c.compose(f, k)) - to.begin()));
    }
    arr.push_back(make_map(obj[c.src(f)], obj[c.tgt(f)], std::move(fn)));
  }
  return validate_model(t, base, std::move(obj), std::move(arr), "T/-");
}

NaturalModel natural_model_check(const CatRef& base, const DFibRef& u, const DFibRef& e, const DFibMap& p) {
  auto term = terminal_object(*base);
  if (!term) throw LawError(LawKind::NoTerminal, "base " + base->name() + " has no terminal object");
  validate(*u);
  validate(*e);
  if (p.src != e || p.tgt != u || !over_identity(p)) throw LawError(LawKind::Malformed, "p is not a map E -> U");
  validate(p);
  Elem bad;
  auto ra = right_adjoint(p, &bad);
  if (!ra)
    throw LawError(LawKind::NotRepresentable, "type " + elem_name(*u, bad) + " has no context extension",
                   {u->element_name(bad.obj, bad.idx), base->object_name(bad.obj)});
  NaturalModel nm{base, *term, u, e, p, *ra, {}};
  for (Obj o = 0; o < base->num_objects(); ++o)
    for (int i = 0; i < u->fiber_size(o); ++i) nm.extensions.push_back({{o, i}, context_extension(p, *ra, {o, i})});
  return nm;
}

NaturalLanguage internal_language(const NaturalModel& nm) {
  return {nm.U->fiber(nm.terminal), nm.E->fiber(nm.terminal), nm.p.fn[nm.terminal]};
}

size_t polynomial_power_count(const NaturalModel& nm, int n) {
  DFibRef a = nm.U;
  for (int i = 0; i < n; ++i) a = polynomial(nm.p, nm.ra, a).obj;
  return static_cast<size_t>(a->fiber_size(nm.terminal));
}

size_t telescope_count(const NaturalModel& nm, int k) {
  std::function<size_t(Obj, int)> go = [&](Obj b, int left) -> size_t {
    if (left == 0) return 1;
    size_t n = 0;
    for (int i = 0; i < nm.U->fiber_size(b); ++i) n += go(nm.ra({b, i}).obj, left - 1);
    return n;
  };
  return go(nm.terminal, k);
}

std::vector<bool> contextual_closure(const CatRef& base, const std::vector<DFibMap>& reps) {
  const FinCat& b = *base;
  std::vector<bool> in(b.num_objects());
  auto add = [&](Obj c) {
    bool changed = false;
    for (Obj o = 0; o < b.num_objects(); ++o)
      if (!in[o] && b.isomorphic(o, c)) in[o] = changed = true;
    return changed;
  };
  for (Obj o = 0; o < b.num_objects(); ++o)
    if (is_terminal(b, o)) in[o] = true;
  std::vector<RightAdjoint> ras;
  for (const auto& u : reps) {
    auto ra = right_adjoint(u);
    if (!ra) throw LawError(LawKind::MissingAdjoint, u.src->name() + " -> " + u.tgt->name() + " is not representable");
    ras.push_back(*ra);
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (Obj o = 0; o < b.num_objects(); ++o) {
      if (!in[o]) continue;
      for (size_t r = 0; r < reps.size(); ++r)
        for (int y = 0; y < reps[r].tgt->fiber_size(o); ++y) changed |= add(ras[r]({o, y}).obj);
    }
  }
  return in;
}

std::vector<bool> contextual_closure(const Model& m) {
  std::vector<DFibMap> reps;
  for (Arr f = 0; f < m.T->cat().num_arrows(); ++f)
    if (m.T->representable[f]) reps.push_back(m.arr[f]);
  return contextual_closure(m.base, reps);
}

std::vector<bool> contextual_closure(const NaturalModel& nm) { return contextual_closure(nm.base, {nm.p}); }

bool is_democratic(const Model& m) {
  auto c = contextual_closure(m);
  return std::all_of(c.begin(), c.end(), [](bool x) { return x; });
}

bool is_democratic(const NaturalModel& nm) {
  auto c = contextual_closure(nm);
  return std::all_of(c.begin(), c.end(), [](bool x) { return x; });
}

Arr extension_comparison(const ModelMorphism& F, Arr f, Elem y) {
  const Model& m = *F.src;
  const Model& n = *F.tgt;
  const FinCat& nb = *n.base;
  const FinCat& tc = m.T->cat();
  auto ru = right_adjoint(m.arr[f]);
  auto rv = right_adjoint(n.arr[f]);
  if (!ru || !rv) throw LawError(LawKind::MissingAdjoint, tc.arrow_name(f) + " has no right adjoint");
  Elem x0 = (*ru)(y);
  Arr k = ru->counit[y.obj][y.idx];
  Elem fy = F.comp[tc.tgt(f)](y);
  Elem x1 = (*rv)(fy);
  Arr k1 = rv->counit[fy.obj][fy.idx];
  int fx0 = F.comp[tc.src(f)].fn[x0.obj][x0.idx];
  for (Arr mm : nb.hom(F.base(x0.obj), x1.obj))
    if (n.obj[tc.src(f)]->act(x1.idx, mm) == fx0 && nb.compose(k1, mm) == F.base.arr(k)) return mm;
  return kNone;
}

void check_morphism(const ModelMorphism& F) {
  const Model& m = *F.src;
  const Model& n = *F.tgt;
  const FinCat& tc = m.T->cat();
  validate(F.base);
  if (F.base.src != m.base || F.base.tgt != n.base)
    throw LawError(LawKind::Malformed, "base functor does not join the two bases");
  if (!is_terminal(*n.base, F.base(m.terminal)))
    throw LawError(LawKind::NoTerminal, "base functor sends the terminal object to " +
                                            n.base->object_name(F.base(m.terminal)));
  if (static_cast<int>(F.comp.size()) != tc.num_objects())
    throw LawError(LawKind::Malformed, "morphism needs one component per object of " + tc.name());
  for (Obj a = 0; a < tc.num_objects(); ++a) {
    const DFibMap& c = F.comp[a];
    if (c.src != m.obj[a] || c.tgt != n.obj[a] || !(c.base == F.base))
      throw LawError(LawKind::Malformed, "component at " + tc.object_name(a) + " has the wrong endpoints");
    try {
      validate(c);
    } catch (const LawError& e) {
      throw LawError(LawKind::NotNatural, "component at " + tc.object_name(a) + ": " + e.what(),
                     {tc.object_name(a)});
    }
  }
  for (Arr f = 0; f < tc.num_arrows(); ++f) {
    Obj a = tc.src(f), b = tc.tgt(f);
    if (compose(n.arr[f], F.comp[a]).fn != compose(F.comp[b], m.arr[f]).fn)
      throw LawError(LawKind::NotNatural, "square of " + tc.arrow_name(f) + " does not commute", {tc.arrow_name(f)});
  }
  for (Arr f = 0; f < tc.num_arrows(); ++f) {
    if (!m.T->representable[f]) continue;
    const DFib& y = *m.obj[tc.tgt(f)];
    for (Obj o = 0; o < m.base->num_objects(); ++o)
      for (int i = 0; i < y.fiber_size(o); ++i) {
        Arr c = extension_comparison(F, f, {o, i});
        if (c == kNone || !n.base->is_iso(c))
          throw LawError(LawKind::BCFails,
                         "square of " + tc.arrow_name(f) + " fails Beck-Chevalley at " + elem_name(y, {o, i}),
                         {tc.arrow_name(f), y.element_name(o, i)});
      }
  }
}

bool is_morphism(const ModelMorphism& f) {
  try {
    check_morphism(f);
    return true;
  } catch (const LawError&) {
    return false;
  }
}

ModelMorphism identity_morphism(const ModelRef& m) {
  ModelMorphism out{m, m, identity_functor(m->base), {}};
  for (const auto& d : m->obj) out.comp.push_back(identity_map(d));
  return out;
}

ModelMorphism compose(const ModelMorphism& g, const ModelMorphism& f) {
  ModelMorphism out{f.src, g.tgt, compose(g.base, f.base), {}};
  for (size_t a = 0; a < f.comp.size(); ++a) out.comp.push_back(compose(g.comp[a], f.comp[a]));
  return out;
}

void check_2morphism(const ModelMorphism& F, const ModelMorphism& G, const NatTrans& sigma) {
  if (!(sigma.from == F.base) || !(sigma.to == G.base))
    throw LawError(LawKind::Malformed, "transformation does not join the two base functors");
  validate(sigma);
  const Model& m = *F.src;
  const Model& n = *F.tgt;
  const FinCat& tc = m.T->cat();
  for (Obj a = 0; a < tc.num_objects(); ++a) {
    const DFib& d = *m.obj[a];
    for (Obj o = 0; o < m.base->num_objects(); ++o)
      for (int x = 0; x < d.fiber_size(o); ++x)
        if (F.comp[a].fn[o][x] != n.obj[a]->act(G.comp[a].fn[o][x], sigma.component[o]))
          throw LawError(LawKind::NoOverlay,
                         "no overlay at " + tc.object_name(a) + " for " + elem_name(d, {o, x}),
                         {tc.object_name(a), d.element_name(o, x)});
  }
}

bool is_2morphism(const ModelMorphism& f, const ModelMorphism& g, const NatTrans& sigma) {
  try {
    check_2morphism(f, g, sigma);
    return true;
  } catch (const LawError&) {
    return false;
  }
}

Heart heart(const ModelRef& mref) {
  const Model& m = *mref;
  const FinCat& tc = m.T->cat();
  auto in = contextual_closure(m);
  std::vector<Obj> objs;
  for (Obj o = 0; o < m.base->num_objects(); ++o)
    if (in[o]) objs.push_back(o);
  auto sub = full_subcategory(m.base, objs, m.base->name() + "^heart");
  const Functor& inc = sub.inclusion;
  std::vector<DFibRef> obj;
  for (Obj a = 0; a < tc.num_objects(); ++a) {
    obj.push_back(std::make_shared<const DFib>(renamed(base_change(*m.obj[a], inc, inc.src), m.obj[a]->name())));
  }
  std::vector<DFibMap> arr;
  for (Arr f = 0; f < tc.num_arrows(); ++f) {
    std::vector<std::vector<int>> fn;
    for (Obj o : objs) fn.push_back(m.arr[f].fn[o]);
    arr.push_back(make_map(obj[tc.src(f)], obj[tc.tgt(f)], std::move(fn)));
  }
  auto h = std::make_shared<const Model>(validate_model(m.T, inc.src, obj, std::move(arr), m.name + "^heart"));
  ModelMorphism incl{h, mref, inc, {}};
  for (Obj a = 0; a < tc.num_objects(); ++a) {
    std::vector<std::vector<int>> fn;
    for (Obj o : objs) {
      fn.emplace_back(m.obj[a]->fiber_size(o));
      std::iota(fn.back().begin(), fn.back().end(), 0);
    }
    incl.comp.push_back(DFibMap{h->obj[a], m.obj[a], inc, std::move(fn)});
  }
  check_morphism(incl);
  return {h, incl};
}

NaturalModel heart(const NaturalModel& nm) {
  auto in = contextual_closure(nm);
  std::vector<Obj> objs;
  for (Obj o = 0; o < nm.base->num_objects(); ++o)
    if (in[o]) objs.push_back(o);
  auto sub = full_subcategory(nm.base, objs, nm.base->name() + "^heart");
  const Functor& inc = sub.inclusion;
  auto u = std::make_shared<const DFib>(renamed(base_change(*nm.U, inc, inc.src), nm.U->name()));
  auto e = std::make_shared<const DFib>(renamed(base_change(*nm.E, inc, inc.src), nm.E->name()));
  std::vector<std::vector<int>> fn;
  for (Obj o : objs) fn.push_back(nm.p.fn[o]);
  return natural_model_check(inc.src, u, e, make_map(e, u, std::move(fn)));
}

Model bi_initial_model(const RMCatRef& t) {
  const FinCat& c = t->cat();
  std::vector<Obj> objs;
  for (Obj x = 0; x < c.num_objects(); ++x)
    if (t->representable[c.hom(x, t->terminal()).front()]) objs.push_back(x);
  auto sub = full_subcategory(t->cat_ref(), objs, "iM(" + c.name() + ")");
  const Functor& inc = sub.inclusion;
  const CatRef& base = inc.src;
  const FinCat& b = *base;
  auto pos = [](const std::vector<Arr>& v, Arr f) { return static_cast<int>(std::find(v.begin(), v.end(), f) - v.begin()); };
  std::vector<DFibRef> obj;
  for (Obj a = 0; a < c.num_objects(); ++a) {
    std::vector<std::vector<std::string>> fibers;
    for (Obj i = 0; i < b.num_objects(); ++i) {
      fibers.emplace_back();
      for (Arr k : c.hom(inc(i), a)) fibers.back().push_back(c.arrow_name(k));
    }
    std::vector<std::vector<int>> r;
    for (Arr u = 0; u < b.num_arrows(); ++u) {
      r.emplace_back();
      const auto& to = c.hom(inc(b.src(u)), a);
      for (Arr k : c.hom(inc(b.tgt(u)), a)) r.back().push_back(pos(to, c.compose(k, inc.arr(u))));
    }
    obj.push_back(std::make_shared<const DFib>(base, c.object_name(a), std::move(fibers), std::move(r)));
  }
  std::vector<DFibMap> arr;
  for (Arr f = 0; f < c.num_arrows(); ++f) {
    std::vector<std::vector<int>> fn;
    for (Obj i = 0; i < b.num_objects(); ++i) {
      fn.emplace_back();
      const auto& to = c.hom(inc(i), c.tgt(f));
      for (Arr k : c.hom(inc(i), c.src(f))) fn.back().push_back(pos(to, c.compose(f, k)));
    }
    arr.push_back(make_map(obj[c.src(f)], obj[c.tgt(f)], std::move(fn)));
  }
  return validate_model(t, base, std::move(obj), std::move(arr), "iM");
}

Theory internal_language(const Model& m) {
  const FinCat& tc = m.T->cat();
  Theory th{m.T, {}, {}};
  for (Obj a = 0; a < tc.num_objects(); ++a) th.sets.push_back(m.obj[a]->fiber(m.terminal));
  for (Arr f = 0; f < tc.num_arrows(); ++f) th.maps.push_back(m.arr[f].fn[m.terminal]);
  validate_theory(th);
  return th;
}

namespace {

void check_bounds(const Model& m, const Bounds& b) {
  if (m.base->num_objects() > b.max_objects)
    throw Overflow("base of " + m.name + " has more than " + std::to_string(b.max_objects) + " objects");
  for (const auto& d : m.obj)
    for (Obj o = 0; o < m.base->num_objects(); ++o)
      if (d->fiber_size(o) > b.max_fiber)
        throw Overflow("a fiber of " + m.name + " has more than " + std::to_string(b.max_fiber) + " elements");
}

// Morphisms src -> tgt; with iso_only, only those with invertible base
// functor and bijective components. Stops after `stop` results.
std::vector<ModelMorphism> morphisms(const ModelRef& src, const ModelRef& tgt, const Bounds& bounds, bool iso_only,
                                     size_t stop) {
  const Model& m = *src;
  const Model& n = *tgt;
  const FinCat& tc = m.T->cat();
  std::vector<ModelMorphism> out;
  int nt = tc.num_objects();
  for (const auto& F : all_functors(m.base, n.base, bounds.max_results)) {
    if (!is_terminal(*n.base, F(m.terminal))) continue;
    if (iso_only) {
      std::set<Obj> os(F.on_obj.begin(), F.on_obj.end());
      std::set<Arr> as(F.on_arr.begin(), F.on_arr.end());
      if (static_cast<int>(os.size()) != n.base->num_objects() || static_cast<int>(as.size()) != n.base->num_arrows() ||
          m.base->num_objects() != n.base->num_objects() || m.base->num_arrows() != n.base->num_arrows())
        continue;
    }
    std::vector<std::vector<DFibMap>> options(nt);
    bool empty = false;
    for (Obj a = 0; a < nt && !empty; ++a) {
      DFib pulled = base_change(*n.obj[a], F, m.base);
      for_each_map(*m.obj[a], pulled, [&](const std::vector<std::vector<int>>& fn) {
        DFibMap c{m.obj[a], n.obj[a], F, fn};
        if (!iso_only || is_iso(make_map(m.obj[a], std::make_shared<const DFib>(pulled), fn))) options[a].push_back(c);
        if (options[a].size() > bounds.max_results)
          throw Overflow("more than " + std::to_string(bounds.max_results) + " candidate components");
        return true;
      });
      empty = options[a].empty();
    }
    if (empty) continue;
    ModelMorphism cur{src, tgt, F, std::vector<DFibMap>(nt)};
    std::function<bool(Obj)> go = [&](Obj a) -> bool {
      if (a == nt) {
        if (is_morphism(cur)) {
          if (out.size() >= bounds.max_results)
            throw Overflow("more than " + std::to_string(bounds.max_results) + " morphisms");
          out.push_back(cur);
          if (out.size() >= stop) return false;
        }
        return true;
      }
      for (const auto& c : options[a]) {
        cur.comp[a] = c;
        bool ok = true;
        for (Arr f = 0; f < tc.num_arrows() && ok; ++f) {
          Obj s = tc.src(f), t = tc.tgt(f);
          if (s > a || t > a) continue;
          ok = compose(n.arr[f], cur.comp[s]).fn == compose(cur.comp[t], m.arr[f]).fn;
        }
        if (ok && !go(a + 1)) return false;
      }
      return true;
    };
    if (!go(0)) break;
  }
  return out;
}

}  // namespace

std::vector<ModelMorphism> enumerate_model_morphisms(const ModelRef& src, const ModelRef& tgt, const Bounds& b) {
  check_bounds(*src, b);
  check_bounds(*tgt, b);
  return morphisms(src, tgt, b, false, static_cast<size_t>(-1));
}

std::vector<NatTrans> enumerate_2morphisms(const ModelMorphism& F, const ModelMorphism& G) {
  const FinCat& c = *F.base.src;
  const FinCat& d = *F.base.tgt;
  std::vector<NatTrans> out;
  NatTrans cur{F.base, G.base, std::vector<Arr>(c.num_objects(), kNone)};
  std::function<void(Obj)> go = [&](Obj o) {
    if (o == c.num_objects()) {
      if (is_2morphism(F, G, cur)) out.push_back(cur);
      return;
    }
    for (Arr s : d.hom(F.base(o), G.base(o))) {
      cur.component[o] = s;
      bool ok = true;
      for (Arr f = 0; f < c.num_arrows() && ok; ++f) {
        Obj a = c.src(f), b = c.tgt(f);
        if (a > o || b > o) continue;
        ok = d.compose(cur.component[b], F.base.arr(f)) == d.compose(G.base.arr(f), cur.component[a]);
      }
      if (ok) go(o + 1);
    }
    cur.component[o] = kNone;
  };
  go(0);
  return out;
}

HomReport hom_category(const ModelRef& src, const ModelRef& tgt, const Bounds& b) {
  HomReport r;
  auto ms = enumerate_model_morphisms(src, tgt, b);
  r.morphisms = ms.size();
  bool one_each = !ms.empty();
  for (const auto& f : ms)
    for (const auto& g : ms) {
      auto ts = enumerate_2morphisms(f, g);
      r.max_2morphisms = std::max(r.max_2morphisms, ts.size());
      one_each = one_each && ts.size() == 1;
      for (const auto& t : ts)
        for (Arr s : t.component) r.all_invertible = r.all_invertible && tgt->base->is_iso(s);
    }
  r.contractible = one_each;
  return r;
}

bool hom_category_contractible(const ModelRef& src, const ModelRef& tgt, const Bounds& b) {
  return hom_category(src, tgt, b).contractible;
}

std::optional<ModelMorphism> find_model_isomorphism(const ModelRef& a, const ModelRef& b) {
  if (a->T != b->T) return std::nullopt;
  Bounds bounds;
  bounds.max_results = 1000000;
  auto ms = morphisms(a, b, bounds, true, 1);
  if (ms.empty()) return std::nullopt;
  return ms.front();
}

}  // namespace rmk::cat
