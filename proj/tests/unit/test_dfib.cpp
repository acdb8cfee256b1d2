#include <set>

#include "doctest.h"
#include "rmk/cat/dfib.hpp"
#include "rmk/cat/random.hpp"

using namespace rmk::cat;

namespace {

CatRef ref(FinCat c) { return std::make_shared<const FinCat>(std::move(c)); }
DFibRef ref(DFib d) { return std::make_shared<const DFib>(std::move(d)); }

// Counts natural families of functions d -> e by trying every assignment.
size_t brute_count(const DFib& d, const DFib& e, const MapFilter& allowed = {}) {
  const FinCat& b = *d.base();
  std::vector<std::vector<int>> m;
  for (Obj a = 0; a < b.num_objects(); ++a) m.emplace_back(d.fiber_size(a), 0);
  std::vector<Elem> slots;
  for (Obj a = 0; a < b.num_objects(); ++a)
    for (int i = 0; i < d.fiber_size(a); ++i) slots.push_back({a, i});
  for (const auto& s : slots)
    if (e.fiber_size(s.obj) == 0) return 0;
  size_t n = 0;
  for (;;) {
    bool ok = true;
    for (Arr f = 0; f < b.num_arrows() && ok; ++f)
      for (int x = 0; x < d.fiber_size(b.tgt(f)) && ok; ++x)
        ok = m[b.src(f)][d.act(x, f)] == e.act(m[b.tgt(f)][x], f);
    for (const auto& s : slots)
      if (ok && allowed) ok = allowed(s.obj, s.idx, m[s.obj][s.idx]);
    n += ok;
    size_t k = 0;
    for (; k < slots.size(); ++k) {
      int& v = m[slots[k].obj][slots[k].idx];
      if (++v < e.fiber_size(slots[k].obj)) break;
      v = 0;
    }
    if (k == slots.size()) return n;
  }
}

DFib set_fib(const CatRef& one, const std::string& name, int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(name + std::to_string(i));
  std::vector<int> id(n);
  for (int i = 0; i < n; ++i) id[i] = i;
  return DFib(one, name, {names}, {id});
}

}  // namespace

TEST_CASE("yoneda fibrations") {
  auto w = ref(walking_arrow());
  auto y = yoneda(w, 1);
  CHECK_NOTHROW(validate(y));
  CHECK(y.fiber(0) == std::vector<std::string>{"f"});
  CHECK(y.fiber(1) == std::vector<std::string>{"id_1"});
  auto t = yoneda(ref(terminal_category()), 0);
  CHECK(t.fiber_size(0) == 1);
  // y(b) is representable by b itself.
  auto e = representing_element(y);
  REQUIRE(e);
  CHECK(e->obj == 1);
}

TEST_CASE("yoneda lemma against brute force") {
  auto w = ref(walking_arrow());
  auto y1 = ref(yoneda(w, 1));
  auto r = yoneda_bijection(w, 1, y1);
  CHECK(r.maps == w->hom(1, 1).size());
  CHECK(r.bijective);

  Rng rng(11);
  for (int k = 0; k < 60; ++k) {
    auto b = ref(random_category(rng, 4));
    auto d = ref(random_dfib(rng, b, 3));
    CHECK_NOTHROW(validate(*d));
    Obj x = rng.below(b->num_objects());
    auto rep = yoneda_bijection(b, x, d);
    CHECK(rep.maps == brute_count(yoneda(b, x), *d));
    CHECK(rep.maps == static_cast<size_t>(d->fiber_size(x)));
    CHECK(rep.bijective);
  }
}

TEST_CASE("map enumeration matches brute force") {
  Rng rng(5);
  for (int k = 0; k < 40; ++k) {
    auto b = ref(random_category(rng, 3));
    auto d = random_dfib(rng, b, 2);
    auto e = random_dfib(rng, b, 3);
    CHECK(count_maps(d, e) == brute_count(d, e));
  }
}

TEST_CASE("total categories and projections") {
  Rng rng(3);
  for (int k = 0; k < 30; ++k) {
    auto b = ref(random_category(rng, 3));
    auto d = ref(random_dfib(rng, b, 3));
    Total t = total(d);
    CHECK_NOTHROW(validate(*t.cat));
    CHECK_NOTHROW(validate(t.proj));
    CHECK(is_discrete_fibration(t.proj));
    // Faithful, and isomorphisms are reflected.
    for (Obj x = 0; x < t.cat->num_objects(); ++x)
      for (Obj z = 0; z < t.cat->num_objects(); ++z) {
        std::set<Arr> img;
        for (Arr g : t.cat->hom(x, z)) {
          img.insert(t.proj.arr(g));
          if (b->is_iso(t.proj.arr(g))) CHECK(t.cat->is_iso(g));
        }
        CHECK(img.size() == t.cat->hom(x, z).size());
      }
    auto back = fibration_of(t.proj);
    for (Obj a = 0; a < b->num_objects(); ++a) CHECK(back.fiber_size(a) == d->fiber_size(a));
  }
  // The domain projection of a slice is a discrete fibration.
  auto w = ref(walking_arrow());
  CHECK(is_discrete_fibration(slice(w, 1).inclusion));
  // The codomain functor of the walking arrow onto itself is not.
  Functor collapse{w, w, {1, 1}, {w->id(1), w->id(1), w->id(1)}};
  CHECK(!is_discrete_fibration(collapse));
}

TEST_CASE("functoriality violations are reported") {
  auto w = ref(walking_arrow());
  // Identity restriction must fix elements.
  CHECK_THROWS_AS(validate(DFib(w, "bad", {{"a"}, {"x", "y"}}, {{0}, {1, 0}, {0, 0}})), LawError);
  auto r = complete_restrictions(*w, {{"a"}, {"x", "y"}}, {{}, {}, {0, 0}});
  CHECK(r[w->id(1)] == std::vector<int>{0, 1});
}

TEST_CASE("base change") {
  auto w = ref(walking_arrow());
  auto d = ref(DFib(w, "D", {{"a", "b"}, {"x", "y"}}, {{0, 1}, {0, 1}, {1, 0}}));
  validate(*d);
  auto same = base_change(*d, identity_functor(w));
  for (Obj a = 0; a < 2; ++a) CHECK(same.fiber(a) == d->fiber(a));
  CHECK(same.restrictions() == d->restrictions());
  CHECK(base_change_is_pullback(*d, identity_functor(w), same));

  // Constant at the object 1 of the walking arrow: every fiber is D(1).
  auto two = ref(free_category({"p", "q"}, {{"k", 0, 1}}));
  Functor cst{two, w, {1, 1}, {w->id(1), w->id(1), w->id(1)}};
  validate(cst);
  auto c = base_change(*d, cst);
  CHECK(c.fiber(0) == d->fiber(1));
  CHECK(c.fiber(1) == d->fiber(1));
  CHECK(c.restriction(two->arrow_named("k")) == std::vector<int>{0, 1});
  CHECK(base_change_is_pullback(*d, cst, c));

  // Base change of y(b) along F has fibers Hom(F a', b).
  Functor inc{two, w, {0, 1}, {w->id(0), w->id(1), w->arrow_named("f")}};
  validate(inc);
  auto y = yoneda(w, 1);
  auto by = base_change(y, inc);
  for (Obj a = 0; a < 2; ++a) CHECK(static_cast<size_t>(by.fiber_size(a)) == w->hom(inc(a), 1).size());
}

TEST_CASE("transport along a natural transformation") {
  auto w = ref(walking_arrow());
  auto one = ref(terminal_category());
  auto d = ref(DFib(w, "D", {{"a", "b", "c"}, {"x", "y"}}, {{0, 1, 2}, {0, 1}, {2, 0}}));
  validate(*d);
  Functor at0{one, w, {0}, {w->id(0)}};
  Functor at1{one, w, {1}, {w->id(1)}};
  NatTrans s{at0, at1, {w->arrow_named("f")}};
  auto t = transport_along_nat(s, d);
  validate(t.sigma_star);
  // Over the terminal base, σ* is restriction along f.
  CHECK(t.sigma_star.fn[0] == d->restriction(w->arrow_named("f")));
  CHECK(t.overlay_candidates == 1);
  auto ti = transport_along_nat(identity_nat(at1), d);
  CHECK(ti.sigma_star.fn[0] == std::vector<int>{0, 1});
  CHECK(ti.overlay_candidates == 1);
}

TEST_CASE("representable maps over the terminal category are bijections") {
  auto one = ref(terminal_category());
  for (int n = 0; n <= 3; ++n)
    for (int m = 0; m <= 3; ++m) {
      auto x = ref(set_fib(one, "x", n));
      auto y = ref(set_fib(one, "y", m));
      for (const auto& u : all_maps(x, y)) {
        std::set<int> img(u.fn[0].begin(), u.fn[0].end());
        bool bijective = n == m && static_cast<int>(img.size()) == n;
        CHECK(is_representable(u) == bijective);
      }
    }
}

TEST_CASE("right adjoints satisfy the adjunction") {
  Rng rng(17);
  int found = 0;
  for (int k = 0; k < 200; ++k) {
    auto b = ref(random_category(rng, 3));
    auto x = ref(random_dfib(rng, b, 2));
    auto y = ref(random_dfib(rng, b, 2));
    auto u = random_map(rng, x, y);
    if (!u) continue;
    auto ra = right_adjoint(*u);
    if (!ra) continue;
    ++found;
    CHECK(verify_adjunction(*u, *ra));
    Total tx = total(x), ty = total(y);
    CHECK_NOTHROW(validate(adjoint_functor(*u, *ra, tx, ty)));
    for (Obj a = 0; a < b->num_objects(); ++a)
      for (int i = 0; i < y->fiber_size(a); ++i) {
        auto ext = context_extension(*u, *ra, {a, i});
        CHECK(extension_is_pullback(*u, {a, i}, ext));
      }
  }
  CHECK(found > 20);
  // Identity maps are their own adjoints.
  auto w = ref(walking_arrow());
  auto d = ref(yoneda(w, 1));
  auto ra = right_adjoint(identity_map(d));
  REQUIRE(ra);
  for (Obj a = 0; a < 2; ++a)
    for (int i = 0; i < d->fiber_size(a); ++i) {
      CHECK(ra->value[a][i] == Elem{a, i});
      CHECK(w->is_identity(ra->counit[a][i]));
    }
}

TEST_CASE("representable fibrations versus representable terminal maps") {
  // Over two discrete objects the terminal fibration is not a slice, yet
  // its map to the terminal fibration (the identity) is representable.
  auto d2 = ref(discrete_category(2));
  auto one = ref(terminal_dfib(d2));
  CHECK(!representing_element(*one));
  CHECK(terminal_map_representable(one));
  // With a terminal object the second implies the first.
  Rng rng(23);
  for (int k = 0; k < 60; ++k) {
    auto l = ref(random_meet_semilattice(rng, 4));
    auto d = ref(random_dfib(rng, l, 2));
    bool rep = representing_element(*d).has_value();
    bool term = terminal_map_representable(d);
    CHECK((!term || rep));
    // Finite products give the converse.
    CHECK((!rep || term));
  }
}

TEST_CASE("pushforward") {
  auto w = ref(walking_arrow());
  auto z = ref(DFib(w, "Z", {{"a", "b"}, {"x"}}, {{0, 1}, {0}, {1}}));
  auto x = ref(DFib(w, "X", {{"p", "q"}, {"r"}}, {{0, 1}, {0}, {1}}));
  auto g = make_map(z, x, {{0, 1}, {0}});
  validate(g);
  SUBCASE("along the identity") {
    auto id = identity_map(x);
    auto ra = right_adjoint(id);
    REQUIRE(ra);
    auto pf = pushforward(id, *ra, g);
    for (Obj a = 0; a < 2; ++a) CHECK(pf.obj->fiber_size(a) == z->fiber_size(a));
    validate(*pf.obj);
    validate(pf.to_y);
    validate(pf.eval);
    CHECK(find_isomorphism(pf.obj, z));
  }
  SUBCASE("universal property on random instances") {
    Rng rng(29);
    int tested = 0;
    for (int k = 0; k < 300 && tested < 40; ++k) {
      auto b = ref(random_category(rng, 3));
      auto xx = ref(random_dfib(rng, b, 2, "X"));
      auto yy = ref(random_dfib(rng, b, 2, "Y"));
      auto u = random_map(rng, xx, yy);
      if (!u) continue;
      auto ra = right_adjoint(*u);
      if (!ra) continue;
      auto zz = ref(random_dfib(rng, b, 2, "Z"));
      auto gg = random_map(rng, zz, xx);
      auto ww = ref(random_dfib(rng, b, 2, "W"));
      auto wm = random_map(rng, ww, yy);
      if (!gg || !wm) continue;
      ++tested;
      auto pf = pushforward(*u, *ra, *gg);
      CHECK_NOTHROW(validate(*pf.obj));
      CHECK_NOTHROW(validate(pf.to_y));
      CHECK_NOTHROW(validate(pf.eval));
      auto c = pushforward_ump(*u, *gg, pf, *wm);
      CHECK(c.lhs == c.rhs);
      // Brute-force oracle for the left-hand side.
      auto uw = pullback(*u, *wm);
      CHECK(c.lhs == brute_count(*uw.obj, *zz, [&](Obj a, int i, int v) { return gg->fn[a][v] == uw.p1.fn[a][i]; }));
    }
    CHECK(tested >= 20);
  }
}

TEST_CASE("polynomial functors") {
  Rng rng(31);
  int tested = 0;
  for (int k = 0; k < 200 && tested < 25; ++k) {
    auto b = ref(random_meet_semilattice(rng, 4));
    auto y = ref(random_dfib(rng, b, 2, "Y"));
    auto a = ref(random_dfib(rng, b, 2, "A"));
    // X = Y × y(c) -> Y is representable in a meet-semilattice.
    Obj c = rng.below(b->num_objects());
    auto prod = product(y, ref(yoneda(b, c)));
    auto ra = right_adjoint(prod.p1);
    REQUIRE(ra);
    ++tested;
    auto p = polynomial(prod.p1, *ra, a);
    validate(*p.obj);
    for (Obj o = 0; o < b->num_objects(); ++o) {
      // Pairs (y1, a2) with a2 over the context extension of y1.
      std::set<std::pair<int, int>> expected;
      for (int yi = 0; yi < y->fiber_size(o); ++yi) {
        Elem g = (*ra)({o, yi});
        for (int ai = 0; ai < a->fiber_size(g.obj); ++ai) expected.insert({yi, ai});
      }
      std::set<std::pair<int, int>> got(p.decode[o].begin(), p.decode[o].end());
      CHECK(got == expected);
      CHECK(got.size() == p.decode[o].size());
    }
  }
  // u = id: P(A) has fibers Y(b) × A(b); singleton A gives Y back.
  auto w = ref(walking_arrow());
  auto y = ref(DFib(w, "Y", {{"p", "q"}, {"r"}}, {{0, 1}, {0}, {1}}));
  auto a = ref(DFib(w, "A", {{"s", "t", "u"}, {"v", "w"}}, {{0, 1, 2}, {0, 1}, {2, 0}}));
  auto id = identity_map(y);
  auto ra = right_adjoint(id);
  auto p = polynomial(id, *ra, a);
  auto ya = product(y, a);
  CHECK(find_isomorphism(p.obj, ya.obj));
  auto p1 = polynomial(id, *ra, ref(terminal_dfib(w)));
  CHECK(find_isomorphism(p1.obj, y));
}

TEST_CASE("Beck-Chevalley and pullbacks") {
  auto w = ref(walking_arrow());
  auto y = ref(DFib(w, "Y", {{"p", "q"}, {"r"}}, {{0, 1}, {0}, {1}}));
  SUBCASE("identity square") {
    auto id = identity_map(y);
    Square s{id, id, id, id};
    CHECK(commutes(s));
    auto m = canonical_mate(s);
    CHECK_NOTHROW(validate(m));
    for (Arr c : m.component) CHECK(m.from.tgt->is_identity(c));
    auto r = pullback_iff_bc(s);
    CHECK(r.is_pullback);
    CHECK(r.bc);
    CHECK(r.agree);
  }
  SUBCASE("random squares") {
    Rng rng(37);
    int pb = 0, non = 0;
    for (int k = 0; k < 1000 && pb + non < 200; ++k) {
      auto b = ref(random_meet_semilattice(rng, 3));
      auto yy = ref(random_dfib(rng, b, 2, "Y"));
      auto x = product(yy, ref(yoneda(b, rng.below(b->num_objects()))));
      auto yp = ref(random_dfib(rng, b, 2, "Y'"));
      auto wm = random_map(rng, yp, yy);
      if (!wm) continue;
      // Left vertical: either the pullback or another representable over Y'.
      auto pbk = pullback(x.p1, *wm);
      DFibMap left = pbk.p2;
      DFibMap top = pbk.p1;
      if (rng.chance(50)) {
        auto xp = product(yp, ref(yoneda(b, rng.below(b->num_objects()))));
        auto v = random_map(rng, xp.obj, x.obj, [&](Obj a, int i, int val) {
          return x.p1.fn[a][val] == wm->fn[a][xp.p1.fn[a][i]];
        });
        if (!v) continue;
        left = xp.p1;
        top = *v;
      }
      Square s{top, left, x.p1, *wm};
      REQUIRE(commutes(s));
      auto r = pullback_iff_bc(s);
      CHECK(r.agree);
      (r.is_pullback ? pb : non)++;
    }
    CHECK(pb > 5);
    CHECK(non > 5);
  }
  SUBCASE("over a terminal base every such square is a pullback") {
    auto one = ref(terminal_category());
    auto x = ref(set_fib(one, "x", 2));
    auto yy = ref(set_fib(one, "y", 2));
    auto u = make_map(x, yy, {{1, 0}});
    auto x2 = ref(set_fib(one, "x'", 4));
    auto y2 = ref(set_fib(one, "y'", 4));
    // Y' has two copies of each element of Y.
    Square s{make_map(x2, x, {{1, 0, 1, 0}}), make_map(x2, y2, {{0, 1, 2, 3}}), u, make_map(y2, yy, {{0, 1, 0, 1}})};
    REQUIRE(commutes(s));
    auto r = pullback_iff_bc(s);
    CHECK(r.is_pullback);
    CHECK(r.agree);
  }
  SUBCASE("broken square") {
    // y(0) -> 1 over 1 -> 1 on the walking arrow: commutes, representable
    // verticals, but 1 ×_1 1 is not y(0).
    auto t = ref(terminal_dfib(w));
    auto y0 = ref(yoneda(w, 0));
    auto bang = make_map(y0, t, {{0}, {}});
    Square s{bang, bang, identity_map(t), identity_map(t)};
    REQUIRE(commutes(s));
    auto r = pullback_iff_bc(s);
    CHECK(!r.is_pullback);
    CHECK(!r.bc);
    CHECK(r.agree);
  }
}

TEST_CASE("cancellation for discrete fibrations") {
  // In a triangle p' = p ∘ m over a fibration p, m is a fibration iff p' is.
  Rng rng(41);
  for (int k = 0; k < 40; ++k) {
    auto b = ref(random_category(rng, 3));
    auto x = ref(random_dfib(rng, b, 2));
    auto z = ref(random_dfib(rng, b, 2));
    auto g = random_map(rng, z, x);
    if (!g) continue;
    Total tx = total(x), tz = total(z);
    Functor m = total_functor(*g, tz, tx);
    CHECK(is_discrete_fibration(m) == is_discrete_fibration(compose(tx.proj, m)));
    CHECK(is_discrete_fibration(m));
  }
  // A functor into ∫X that is not a fibration composes to a non-fibration.
  auto w = ref(walking_arrow());
  auto x = ref(terminal_dfib(w));
  Total tx = total(x);
  auto d2 = ref(discrete_category(2));
  Functor m{d2, tx.cat, {0, 1}, {tx.cat->id(0), tx.cat->id(1)}};
  CHECK(!is_discrete_fibration(m));
  CHECK(!is_discrete_fibration(compose(tx.proj, m)));
}
