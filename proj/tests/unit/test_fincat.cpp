#include <set>

#include "doctest.h"
#include "rmk/cat/fincat.hpp"

using namespace rmk::cat;

namespace {

CatRef ref(FinCat c) { return std::make_shared<const FinCat>(std::move(c)); }

// Subsets of {0,1} ordered by inclusion; meets are intersections.
FinCat bool_lattice() {
  std::vector<std::string> names{"0", "a", "b", "1"};
  std::vector<unsigned> bits{0, 1, 2, 3};
  std::vector<std::vector<bool>> leq(4, std::vector<bool>(4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) leq[i][j] = (bits[i] & ~bits[j]) == 0;
  return preorder_category(names, leq, "B4");
}

}  // namespace

TEST_CASE("small categories validate") {
  CHECK_NOTHROW(validate(terminal_category()));
  CHECK_NOTHROW(validate(walking_arrow()));
  CHECK_NOTHROW(validate(discrete_category(3)));
  CHECK_NOTHROW(validate(bool_lattice()));
  auto w = walking_arrow();
  CHECK(w.num_arrows() == 3);
  CHECK(w.is_thin());
}

TEST_CASE("mis-assigned composite is reported as non-associative") {
  // One object with arrows id, x, y and a table that is unital but not associative.
  std::vector<Arrow> arrows{{"id_o", 0, 0}, {"x", 0, 0}, {"y", 0, 0}, {"id_p", 1, 1}};
  std::vector<Arr> table(16, kNone);
  auto set = [&](Arr g, Arr f, Arr h) { table[g * 4 + f] = h; };
  for (Arr f : {0, 1, 2}) {
    set(0, f, f);
    set(f, 0, f);
  }
  set(3, 3, 3);
  set(1, 1, 2);
  set(1, 2, 1);
  set(2, 1, 2);
  set(2, 2, 2);
  FinCat c("bad", {"o", "p"}, arrows, {0, 3}, table);
  try {
    validate(c);
    FAIL("expected a law violation");
  } catch (const LawError& e) {
    CHECK(e.kind() == LawKind::NonAssociative);
    CHECK(e.witness().size() == 3);
  }
}

TEST_CASE("builder infers unique composites and rejects ambiguous ones") {
  FinCatBuilder b("chain");
  b.add_object("a");
  b.add_object("b");
  b.add_object("c");
  b.add_arrow("f", "a", "b");
  b.add_arrow("g", "b", "c");
  b.add_arrow("h", "a", "c");
  auto c = b.build();
  CHECK(c.arrow_name(c.compose(c.arrow_named("g"), c.arrow_named("f"))) == "h");

  FinCatBuilder amb("amb");
  amb.add_object("a");
  amb.add_object("b");
  amb.add_object("c");
  amb.add_arrow("f", "a", "b");
  amb.add_arrow("g", "b", "c");
  amb.add_arrow("h1", "a", "c");
  amb.add_arrow("h2", "a", "c");
  CHECK_THROWS_AS(amb.build(), LawError);
}

TEST_CASE("terminal objects") {
  // Hom-set oracle: t is terminal iff every hom into it is a singleton.
  auto oracle = [](const FinCat& c) -> std::optional<Obj> {
    for (Obj t = 0; t < c.num_objects(); ++t) {
      bool ok = true;
      for (Obj a = 0; a < c.num_objects(); ++a) {
        int n = 0;
        for (const auto& ar : c.arrows()) n += ar.src == a && ar.tgt == t;
        ok = ok && n == 1;
      }
      if (ok) return t;
    }
    return std::nullopt;
  };
  auto w = walking_arrow();
  CHECK(terminal_object(w) == oracle(w));
  CHECK(w.object_name(*terminal_object(w)) == "1");
  CHECK(terminal_object(terminal_category()) == 0);
  auto d = discrete_category(2);
  CHECK(!oracle(d));
  CHECK(!terminal_object(d));
  auto l = bool_lattice();
  CHECK(l.object_name(*terminal_object(l)) == "1");
}

TEST_CASE("limits by cone enumeration") {
  auto w = walking_arrow();
  auto f = w.arrow_named("f");
  auto one = w.id(1);
  SUBCASE("pullback of identity along identity") {
    auto p = pullback(w, one, one);
    REQUIRE(p);
    CHECK(p->apex == 1);
  }
  SUBCASE("pullback of f along id_1 is f") {
    auto p = pullback(w, f, one);
    REQUIRE(p);
    CHECK(p->apex == 0);
    CHECK(p->legs == std::vector<Arr>{w.id(0), f});
    CHECK(is_pullback(w, f, one, w.id(0), f));
  }
  SUBCASE("walking cospan has no pullback") {
    FinCatBuilder b("cospan");
    b.add_object("a");
    b.add_object("b");
    b.add_object("c");
    b.add_arrow("f", "a", "c");
    b.add_arrow("g", "b", "c");
    auto c = b.build();
    Diagram d{{0, 1, 2}, {{0, 2, c.arrow_named("f")}, {1, 2, c.arrow_named("g")}}};
    // No object maps to both a and b.
    CHECK(all_cones(c, d).empty());
    CHECK(!pullback(c, c.arrow_named("f"), c.arrow_named("g")));
  }
  SUBCASE("products in the Boolean lattice are meets") {
    auto l = bool_lattice();
    std::vector<unsigned> bits{0, 1, 2, 3};
    for (Obj a = 0; a < 4; ++a)
      for (Obj b = 0; b < 4; ++b) {
        auto p = product(l, a, b);
        REQUIRE(p);
        CHECK(bits[p->apex] == (bits[a] & bits[b]));
      }
  }
  SUBCASE("cone cap") { CHECK_THROWS_AS(all_cones(bool_lattice(), Diagram{{3, 3}, {}}, 2), Overflow); }
}

TEST_CASE("limits are unique up to unique isomorphism") {
  auto l = bool_lattice();
  // Two limit cones for the same diagram factor through each other by isos.
  Diagram d{{1, 2}, {}};
  auto cones = all_cones(l, d);
  std::vector<Cone> limits;
  for (const auto& c : cones)
    if (is_limit(l, d, c)) limits.push_back(c);
  REQUIRE(!limits.empty());
  for (const auto& x : limits)
    for (const auto& y : limits) {
      auto m = factorizations(l, x, y);
      REQUIRE(m.size() == 1);
      CHECK(l.is_iso(m[0]));
    }
}

TEST_CASE("slices") {
  auto w = ref(walking_arrow());
  auto s = slice(w, 1);
  CHECK(s.cat.num_objects() == 2);
  std::set<std::string> objs(s.cat.objects().begin(), s.cat.objects().end());
  CHECK(objs == std::set<std::string>{"f", "id_1"});
  int non_id = 0;
  for (Arr a = 0; a < s.cat.num_arrows(); ++a) non_id += !s.cat.is_identity(a);
  CHECK(non_id == 1);
  CHECK_NOTHROW(validate(s.cat));
  CHECK_NOTHROW(validate(s.inclusion));

  auto t = slice(ref(terminal_category()), 0);
  CHECK(t.cat.num_objects() == 1);
  CHECK(t.cat.num_arrows() == 1);
  auto z = slice(w, 0);
  CHECK(z.cat.num_objects() == 1);
  CHECK(z.cat.num_arrows() == 1);
}

TEST_CASE("functors and natural transformations") {
  auto w = ref(walking_arrow());
  auto fs = all_functors(w, w);
  // Monotone maps of {0 <= 1} to itself.
  CHECK(fs.size() == 3);
  for (const auto& f : fs) CHECK_NOTHROW(validate(f));
  auto id = identity_functor(w);
  CHECK(compose(id, id) == id);
  CHECK_NOTHROW(validate(identity_nat(id)));
  Functor bad{w, w, {1, 0}, {w->id(1), w->id(0), w->arrow_named("f")}};
  CHECK_THROWS_AS(validate(bad), LawError);

  auto p = ref(free_category({"a", "b", "c"}, {{"f", 0, 1}, {"g", 1, 2}}));
  CHECK(p->num_arrows() == 6);
  CHECK_NOTHROW(validate(*p));
  CHECK(p->find_arrow("g.f"));
  auto sub = full_subcategory(p, {0, 2});
  CHECK(sub.cat.num_arrows() == 3);
  CHECK_NOTHROW(validate(sub.inclusion));
}
