#include <map>
#include <set>

#include "doctest.h"
#include "rmk/cat/random.hpp"
#include "rmk/cat/rmcat.hpp"

using namespace rmk::cat;

namespace {

CatRef ref(FinCat c) { return std::make_shared<const FinCat>(std::move(c)); }

// Subsets of {0, .., bits-1} under inclusion, named by their bit strings.
FinCat subset_lattice(int bits, const std::string& name = "Bool") {
  int n = 1 << bits;
  std::vector<std::string> names;
  for (int s = 0; s < n; ++s) {
    std::string b = "s";
    for (int k = bits - 1; k >= 0; --k) b += (s >> k) & 1 ? '1' : '0';
    names.push_back(b);
  }
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) leq[a][b] = (a & ~b) == 0;
  return preorder_category(names, leq, name);
}

FinCat chain(int n, const std::string& name = "Chain") {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(std::to_string(i));
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n));
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) leq[a][b] = true;
  return preorder_category(names, leq, name);
}

Arr le(const FinCat& c, const std::string& a, const std::string& b) {
  return c.hom(c.object(a), c.object(b)).front();
}

// Covariant functor on a preorder T read off a fibration over T^op.
Theory theory_from_op(const RMCatRef& t, const DFib& d) {
  const FinCat& c = t->cat();
  const FinCat& op = *d.base();
  Theory th{t, {}, {}};
  for (Obj a = 0; a < c.num_objects(); ++a) th.sets.push_back(d.fiber(op.object(c.object_name(a))));
  for (Arr f = 0; f < c.num_arrows(); ++f) {
    Obj a = op.object(c.object_name(c.src(f))), b = op.object(c.object_name(c.tgt(f)));
    th.maps.push_back(d.restriction(op.hom(b, a).front()));
  }
  return th;
}

FinCat opposite_preorder(const FinCat& c) {
  int n = c.num_objects();
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) leq[a][b] = !c.hom(b, a).empty();
  return preorder_category(c.objects(), leq, c.name() + "op");
}

}  // namespace

TEST_CASE("boolean lattice with every arrow representable") {
  auto c = ref(subset_lattice(2));
  RMCat rm = validate_rmcat(c, all_arrows(*c));
  // Pushforward of Z <= X along X <= Y is Y ∧ (X ⇒ Z) = Y & (~X | Z).
  for (const auto& [key, w] : rm.pushforwards) {
    auto [f, g] = key;
    unsigned x = static_cast<unsigned>(c->src(f)), y = static_cast<unsigned>(c->tgt(f));
    unsigned z = static_cast<unsigned>(c->src(g));
    CHECK(static_cast<unsigned>(c->src(w.h)) == (y & (~x | z) & 3u));
  }
  size_t chains = 0;
  for (unsigned z = 0; z < 4; ++z)
    for (unsigned x = 0; x < 4; ++x)
      for (unsigned y = 0; y < 4; ++y) chains += (z & ~x) == 0 && (x & ~y) == 0;
  CHECK(rm.pushforwards.size() == chains);
  CHECK(pullback_stable(rm.cart, rm.representable));
}

TEST_CASE("isomorphisms form a valid class") {
  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    auto c = ref(random_meet_semilattice(rng, 5));
    RMCat rm = validate_rmcat(c, isomorphisms(*c));
    CHECK(rm.representables().size() == static_cast<size_t>(c->num_objects()));
  }
}

TEST_CASE("rmcat axiom violations") {
  auto ch = ref(chain(3));
  std::vector<bool> cls = isomorphisms(*ch);
  cls[le(*ch, "0", "1")] = cls[le(*ch, "1", "2")] = true;
  try {
    validate_rmcat(ch, cls);
    FAIL("expected ClassNotClosed");
  } catch (const LawError& e) {
    CHECK(e.kind() == LawKind::ClassNotClosed);
    CHECK(e.witness() == std::vector<std::string>{"0<=1", "1<=2"});
  }

  auto c = ref(subset_lattice(2));
  cls = isomorphisms(*c);
  cls[le(*c, "s01", "s11")] = true;
  try {
    validate_rmcat(c, cls);
    FAIL("expected NotStable");
  } catch (const LawError& e) {
    CHECK(e.kind() == LawKind::NotStable);
    // Pulled back along s10 <= s11 it becomes s00 <= s10.
    CHECK(e.witness() == std::vector<std::string>{"s01<=s11", "s10<=s11", "s00<=s01", "s00<=s10"});
  }

  auto d = ref(discrete_category(2));
  CHECK_THROWS_AS(validate_rmcat(d, isomorphisms(*d)), LawError);
  try {
    cartesian_structure(d);
  } catch (const LawError& e) {
    CHECK(e.kind() == LawKind::NotCartesian);
  }
}

TEST_CASE("a wrong pushforward witness is rejected") {
  auto c = ref(subset_lattice(2));
  Cartesian cart = cartesian_structure(c);
  // f = s01 <= s11, g = s00 <= s01. The pushforward is s10 (= ~s01), not s00.
  Arr f = le(*c, "s01", "s11"), g = le(*c, "s00", "s01");
  PushforwardWitness w{le(*c, "s00", "s11"), c->id(c->object("s00"))};
  std::string why;
  CHECK_FALSE(pushforward_ump(cart, f, g, w, &why));
  CHECK_FALSE(why.empty());
  std::map<std::pair<Arr, Arr>, PushforwardWitness> given{{{f, g}, w}};
  try {
    validate_rmcat(c, all_arrows(*c), given);
    FAIL("expected PushforwardUMPFails");
  } catch (const LawError& e) {
    CHECK(e.kind() == LawKind::PushforwardUMPFails);
  }
  auto found = find_pushforward(cart, f, g);
  REQUIRE(found);
  CHECK(c->object_name(c->src(found->h)) == "s10");
}

TEST_CASE("non-exponentiable arrows") {
  // The pentagon lattice is not distributive, hence not Heyting.
  std::vector<std::string> names{"0", "a", "b", "c", "1"};
  // 0 < a < c < 1, 0 < b < 1 (the pentagon N5).
  std::vector<std::vector<bool>> leq(5, std::vector<bool>(5));
  auto set = [&](int x, int y) { leq[x][y] = true; };
  for (int i = 0; i < 5; ++i) set(i, i), set(0, i), set(i, 4);
  set(1, 3);
  auto n5 = ref(preorder_category(names, leq, "N5"));
  Cartesian cart = cartesian_structure(n5);
  // Brute-force oracle: f : X <= 1 is exponentiable iff every Z <= X has a
  // largest W with W ∧ X <= Z.
  auto meet = [&](Obj x, Obj y) {
    Obj best = -1;
    for (Obj w = 0; w < 5; ++w)
      if (!n5->hom(w, x).empty() && !n5->hom(w, y).empty() && (best < 0 || !n5->hom(best, w).empty())) best = w;
    return best;
  };
  for (Obj x = 0; x < 5; ++x) {
    bool expect = true;
    for (Obj z = 0; z < 5; ++z) {
      if (n5->hom(z, x).empty()) continue;
      std::vector<Obj> ws;
      for (Obj w = 0; w < 5; ++w)
        if (!n5->hom(meet(w, x), z).empty()) ws.push_back(w);
      bool largest = false;
      for (Obj w : ws) {
        bool all = true;
        for (Obj v : ws) all = all && !n5->hom(v, w).empty();
        largest = largest || all;
      }
      expect = expect && largest;
    }
    CHECK(is_exponentiable(cart, n5->hom(x, 4).front()) == expect);
  }
  CHECK_FALSE(is_exponentiable(cart, n5->hom(3, 4).front()));
  try {
    generate_stable_class(n5, {n5->hom(3, 4).front()});
    FAIL("expected NotExponentiable");
  } catch (const LawError& e) {
    CHECK(e.kind() == LawKind::NotExponentiable);
  }
}

TEST_CASE("generated stable classes") {
  auto c = ref(subset_lattice(2));
  CHECK(generate_stable_class(c, {}) == isomorphisms(*c));
  Arr g = le(*c, "s01", "s11");
  auto cls = generate_stable_class(c, {g});
  // Pullbacks of s01 <= s11 are b ∧ s01 <= b; these compose to themselves.
  for (Arr f = 0; f < c->num_arrows(); ++f) {
    int a = c->src(f), b = c->tgt(f);
    CHECK(cls[f] == (a == b || a == (b & 1)));
  }
  CHECK(generate_stable_class(c, [&] {
          std::vector<Arr> v;
          for (Arr f = 0; f < c->num_arrows(); ++f)
            if (cls[f]) v.push_back(f);
          return v;
        }()) == cls);
  CHECK_NOTHROW(validate_rmcat(c, cls));

  Rng rng(5);
  for (int i = 0; i < 25; ++i) {
    auto l = ref(random_meet_semilattice(rng, 6));
    Cartesian cart = cartesian_structure(l);
    std::vector<Arr> gens;
    for (Arr f = 0; f < l->num_arrows(); ++f)
      if (rng.chance(30) && is_exponentiable(cart, f)) gens.push_back(f);
    auto k = generate_stable_class(l, gens);
    CHECK_NOTHROW(validate_rmcat(l, k));
    CHECK(pullback_stable(cart, k));
  }
}

TEST_CASE("slices inherit representables") {
  auto c = ref(subset_lattice(2));
  RMCat rm = validate_rmcat(c, all_arrows(*c));
  SliceRM s = slice_rmcat(rm, c->object("s01"));
  CHECK(s.rm.cat().num_objects() == 2);
  CHECK(s.rm.representables().size() == static_cast<size_t>(s.rm.cat().num_arrows()));
  auto g = generate_stable_class(c, {le(*c, "s01", "s11")});
  RMCat part = validate_rmcat(c, g);
  SliceRM t = slice_rmcat(part, c->object("s11"));
  for (Arr a = 0; a < t.rm.cat().num_arrows(); ++a) CHECK(t.rm.representable[a] == g[t.projection.arr(a)]);
  CHECK(t.rm.cat().num_objects() == c->num_objects());
}

TEST_CASE("representable map functors") {
  auto b = ref(subset_lattice(2));
  auto two = ref(chain(2));
  RMCat rb = validate_rmcat(b, all_arrows(*b));
  RMCat r2 = validate_rmcat(two, all_arrows(*two));
  CHECK(is_rm_functor(rb, rb, identity_functor(b)));

  // Projection to the low bit is a Boolean algebra map.
  Functor proj{b, two, {}, {}};
  for (Obj s = 0; s < 4; ++s) proj.on_obj.push_back(s & 1);
  for (Arr f = 0; f < b->num_arrows(); ++f) proj.on_arr.push_back(two->hom(proj(b->src(f)), proj(b->tgt(f))).front());
  CHECK(is_rm_functor(rb, r2, proj));

  // Inclusion 0 -> s00, 1 -> s01 misses the terminal object.
  Functor inc{two, b, {0, 1}, {}};
  for (Arr f = 0; f < two->num_arrows(); ++f)
    inc.on_arr.push_back(b->hom(inc(two->src(f)), inc(two->tgt(f))).front());
  try {
    check_rm_functor(r2, rb, inc);
    FAIL("expected NotRMFunctor");
  } catch (const LawError& e) {
    CHECK(e.kind() == LawKind::NotRMFunctor);
  }

  // Cardinality to a 3-chain keeps the top but not meets.
  auto three = ref(chain(3));
  RMCat r3 = validate_rmcat(three, all_arrows(*three));
  Functor card{b, three, {0, 1, 1, 2}, {}};
  for (Arr f = 0; f < b->num_arrows(); ++f)
    card.on_arr.push_back(three->hom(card(b->src(f)), card(b->tgt(f))).front());
  CHECK_FALSE(is_rm_functor(rb, r3, card));

  // Representables must go to representables.
  RMCat r2iso = validate_rmcat(two, isomorphisms(*two));
  CHECK_FALSE(is_rm_functor(rb, r2iso, proj));
}

TEST_CASE("adjoining a global section") {
  auto b = ref(subset_lattice(2));
  RMCat rb = validate_rmcat(b, all_arrows(*b));
  Obj top = rb.terminal();
  auto e = adjoin_section_check(rb, top, rb, identity_functor(b), b->id(top));
  CHECK(e.slice.rm.cat().num_objects() == b->num_objects());
  for (Obj k = 0; k < e.slice.rm.cat().num_objects(); ++k)
    CHECK(b->isomorphic(e.extension(k), e.slice.projection(k)));
  CHECK(e.candidates == 1);
  CHECK(e.unique_up_to_iso);

  auto two = ref(chain(2));
  RMCat r2 = validate_rmcat(two, all_arrows(*two));
  Functor proj{b, two, {}, {}};
  for (Obj s = 0; s < 4; ++s) proj.on_obj.push_back(s & 1);
  for (Arr f = 0; f < b->num_arrows(); ++f) proj.on_arr.push_back(two->hom(proj(b->src(f)), proj(b->tgt(f))).front());
  auto x = b->object("s01");
  auto s = adjoin_section_check(rb, x, r2, proj, two->id(1));
  CHECK(s.candidates == 1);
  CHECK(s.unique_up_to_iso);

  // A target with two isomorphic terminal objects admits one extension per
  // choice of terminal object; any two are uniquely isomorphic.
  std::vector<std::vector<bool>> leq{{true, true, true}, {false, true, true}, {false, true, true}};
  auto dup = ref(preorder_category({"0", "1", "1'"}, leq, "Dup"));
  RMCat rd = validate_rmcat(dup, all_arrows(*dup));
  Functor f2{two, dup, {0, 1}, {}};
  for (Arr f = 0; f < two->num_arrows(); ++f) f2.on_arr.push_back(dup->hom(f2(two->src(f)), f2(two->tgt(f))).front());
  auto d = adjoin_section_check(r2, 1, rd, f2, dup->id(1));
  size_t terminals = 0, bottoms = 0;
  for (Obj o = 0; o < 3; ++o) {
    terminals += is_terminal(*dup, o);
    bottoms += dup->isomorphic(o, 0);
  }
  CHECK(d.candidates == terminals * bottoms);
  CHECK(d.candidates == 2);
  CHECK(d.unique_up_to_iso);
}

TEST_CASE("theories and their categories of elements") {
  auto b = ref(subset_lattice(2));
  auto t = std::make_shared<const RMCat>(validate_rmcat(b, all_arrows(*b)));
  Theory k = constant_theory(t);
  CHECK_NOTHROW(validate_theory(k));
  CHECK(elements_category(k).num_objects() == b->num_objects());
  CHECK(elements_category(k).num_arrows() == b->num_arrows());
  for (Obj x = 0; x < b->num_objects(); ++x) CHECK_NOTHROW(validate_theory(hom_theory(t, x)));

  // Θ(s00) empty, everything else a point: the product s01 × s10 is lost.
  Theory lost = k;
  lost.sets[0].clear();
  for (Arr f = 0; f < b->num_arrows(); ++f)
    if (b->src(f) == 0) lost.maps[f].clear();
  std::string w1, w2;
  CHECK_FALSE(preserves_designated_limits(lost, &w1));
  CHECK_FALSE(elements_cofiltered(lost, &w2));
  CHECK(w2.find("no element maps to both") != std::string::npos);
  try {
    validate_theory(lost);
    FAIL("expected NotCartesian");
  } catch (const LawError& e) {
    CHECK(e.kind() == LawKind::NotCartesian);
  }

  Theory twice = k;
  twice.sets.assign(4, {"p", "q"});
  twice.maps.assign(b->num_arrows(), {0, 1});
  CHECK_THROWS_AS(validate_theory(twice), LawError);

  Theory broken = k;
  broken.sets[3] = {"p", "q"};
  broken.maps[b->id(3)] = {1, 0};
  try {
    validate_theory(broken);
    FAIL("expected NotFunctorial");
  } catch (const LawError& e) {
    CHECK(e.kind() == LawKind::NotFunctorial);
  }
}

TEST_CASE("cone preservation and cofiltered elements agree") {
  Rng rng(23);
  int cart = 0, non = 0;
  for (int i = 0; i < 300; ++i) {
    auto l = ref(random_meet_semilattice(rng, 5));
    auto t = std::make_shared<const RMCat>(validate_rmcat(l, isomorphisms(*l)));
    auto op = ref(opposite_preorder(*l));
    Theory th = theory_from_op(t, random_dfib(rng, op, 2));
    bool a = preserves_designated_limits(th);
    CHECK(a == elements_cofiltered(th));
    (a ? cart : non)++;
  }
  CHECK(cart > 10);
  CHECK(non > 10);
}

TEST_CASE("bounded fragment of fibrations") {
  auto one = ref(terminal_category());
  auto m = dfib_rmcat(one, 3);
  CHECK(m.objects.size() == 4);
  for (size_t k = 0; k < m.arrows.size(); ++k) {
    const auto& f = m.arrows[k];
    std::set<int> image(f.fn[0].begin(), f.fn[0].end());
    bool bij = f.src->fiber_size(0) == f.tgt->fiber_size(0) && image.size() == f.fn[0].size();
    CHECK(m.representable[k] == bij);
  }
  CHECK(validate_bounded(m).ok());

  // Fibrations over the walking arrow are functions S1 -> S0; their iso
  // classes are (|S0|, multiset of fiber sizes).
  auto w = ref(walking_arrow());
  std::set<std::pair<int, std::multiset<int>>> classes;
  for (int n0 = 0; n0 <= 2; ++n0)
    for (int n1 = 0; n1 <= 2; ++n1) {
      int total = 1;
      for (int i = 0; i < n1; ++i) total *= n0;
      for (int code = 0; code < total; ++code) {
        std::vector<int> sizes(n0, 0);
        for (int i = 0, c = code; i < n1; ++i, c /= n0) ++sizes[c % n0];
        classes.emplace(n0, std::multiset<int>(sizes.begin(), sizes.end()));
      }
    }
  auto mw = dfib_rmcat(w, 2);
  CHECK(mw.objects.size() == classes.size());
  auto rep = validate_bounded(mw);
  CHECK(rep.ok());
  CHECK(rep.checks > 100);

  auto d2 = ref(discrete_category(2));
  CHECK(validate_bounded(dfib_rmcat(d2, 2)).ok());
  CHECK_THROWS_AS(dfib_rmcat(w, 3, 10), Overflow);
}
