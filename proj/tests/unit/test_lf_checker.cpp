#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rmk/lf/checker.hpp"

using namespace rmk::lf;

namespace {

std::string slurp(const std::string& rel) {
  std::ifstream in(std::string(RMK_SOURCE_DIR) + "/" + rel);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CheckedSignature load(const std::string& name) {
  return check_signature(parse_signature(slurp("corpus/" + name + ".lfsig")));
}

TermPtr P(const CheckedSignature& s, const std::string& text) {
  auto names = s.source.symbol_names();
  return parse_term(text, &names);
}

PreContext C(const CheckedSignature& s, std::vector<std::pair<std::string, std::string>> entries) {
  PreContext out;
  for (auto& [x, a] : entries) out.emplace_back(x, P(s, a));
  return out;
}

}  // namespace

TEST_CASE("corpus signatures are accepted") {
  for (const char* name : {"dtt", "pi", "id", "universes", "twolevel", "prop", "predicate", "cubical"}) {
    CAPTURE(name);
    try {
      auto s = load(name);
      CHECK(s.certificates.size() == s.source.entries.size());
    } catch (const CheckError& e) {
      FAIL(e.entry << ": " << e.what());
    }
  }
}

TEST_CASE("el without Type is an unbound symbol") {
  try {
    check_signature(parse_signature("el : (A : Type) => Rep\n"));
    FAIL("accepted");
  } catch (const CheckError& e) {
    CHECK(e.kind() == ErrorKind::UnboundSymbol);
    CHECK(e.entry == "el");
  }
}

TEST_CASE("check_type examples") {
  auto s = load("dtt");
  auto ctx = C(s, {{"A", "Type"}});
  CHECK(check_type(s, ctx, P(s, "(x : el(A)) -> Type"), mk_box()).ok);
  auto r = check_type(s, ctx, P(s, "(B : Type) -> Type"), mk_box());
  CHECK_FALSE(r.ok);
  CHECK(r.kind == ErrorKind::NotRepresentable);
  CHECK(r.rule == "pi-form");

  auto ctx2 = C(s, {{"A", "Type"}, {"a", "el(A)"}});
  CHECK(check_type(s, ctx2, P(s, "refl a"), P(s, "a = a in el(A)")).ok);
  CHECK(check_type(s, ctx2, P(s, "el(A)"), mk_rep()).ok);
  CHECK(check_type(s, ctx2, P(s, "el(A)"), mk_box()).ok);
  CHECK_FALSE(check_type(s, ctx2, P(s, "a = a in el(A)"), mk_rep()).ok);
  auto bad = check_type(s, ctx2, P(s, "a"), P(s, "Type"));
  CHECK(bad.kind == ErrorKind::TypeMismatch);
}

TEST_CASE("check_equal examples") {
  auto s = load("dtt");
  auto ctx = C(s, {{"A", "Type"}, {"B", "el(A) -> Type"}, {"b", "(x : el(A)) -> el(B x)"}, {"a", "el(A)"}});
  // Framework beta: app(A, x.B, \(x:A).b, a) == b[a/x].
  CHECK(check_equal(s, ctx, P(s, "(\\(x : el(A)). b x) a"), P(s, "b a"), P(s, "el(B a)")));

  auto hyp = C(s, {{"A", "Type"}, {"a", "el(A)"}, {"b", "el(A)"}, {"p", "a = b in el(A)"}});
  CHECK(check_equal(s, hyp, P(s, "a"), P(s, "b"), P(s, "el(A)")));

  auto two = C(s, {{"A", "Type"}, {"x", "el(A)"}, {"y", "el(A)"}});
  CHECK_FALSE(check_equal(s, two, P(s, "x"), P(s, "y"), P(s, "el(A)")));
  // Proof irrelevance at equation types.
  auto pq = C(s, {{"A", "Type"}, {"x", "el(A)"}, {"p", "x = x in el(A)"}});
  CHECK(check_equal(s, pq, P(s, "p"), P(s, "refl x"), P(s, "x = x in el(A)")));
}

TEST_CASE("signature equations are used") {
  auto pi = load("pi");
  auto ctx = C(pi, {{"A", "Type"}, {"B", "el(A) -> Type"}, {"b", "(x : el(A)) -> el(B x)"}, {"a", "el(A)"}});
  CHECK(check_equal(pi, ctx, P(pi, "app(A, B, abs(A, B, b), a)"), P(pi, "b a"), P(pi, "el(B a)")));
  auto eta = C(pi, {{"A", "Type"}, {"B", "el(A) -> Type"}, {"f", "el(Pi(A, B))"}});
  CHECK(check_equal(pi, eta, P(pi, "abs(A, B, \\x. app(A, B, f, x))"), P(pi, "f"), P(pi, "el(Pi(A, B))")));
  auto two = C(pi, {{"A", "Type"}, {"B", "el(A) -> Type"}, {"f", "el(Pi(A, B))"}, {"g", "el(Pi(A, B))"}});
  CHECK_FALSE(check_equal(pi, two, P(pi, "f"), P(pi, "g"), P(pi, "el(Pi(A, B))")));

  auto prop = load("prop");
  auto pc = C(prop, {{"P", "Prop"}, {"x", "true(P)"}, {"y", "true(P)"}});
  CHECK(check_equal(prop, pc, P(prop, "x"), P(prop, "y"), P(prop, "true(P)")));

  auto pred = load("predicate");
  auto bc = C(pred, {{"p", "true(bot)"}, {"A", "Type"}, {"a", "el(A)"}, {"b", "el(A)"}});
  CHECK(check_equal(pred, bc, P(pred, "a"), P(pred, "b"), P(pred, "el(A)")));
  auto nc = C(pred, {{"A", "Type"}, {"a", "el(A)"}, {"b", "el(A)"}});
  CHECK_FALSE(check_equal(pred, nc, P(pred, "a"), P(pred, "b"), P(pred, "el(A)")));
  auto orc = C(pred, {{"P", "Prop"}, {"Q", "Prop"}, {"r", "true(or(P, Q))"}, {"A", "Type"}, {"a", "el(A)"},
                      {"b", "el(A)"}, {"s", "true(P) -> a = b"}, {"t", "true(Q) -> a = b"}});
  CHECK(check_equal(pred, orc, P(pred, "a"), P(pred, "b"), P(pred, "el(A)")));

  auto uni = load("universes");
  CHECK(check_equal(uni, {}, P(uni, "el_U1(u0)"), P(uni, "U0"), P(uni, "Type")));

  auto cub = load("cubical");
  auto cc = C(cub, {{"A", "I -> Type"}, {"P", "Cof"}, {"p", "true(P)"}, {"a", "(i : I) -> el(A i)"}});
  CHECK(check_equal(cub, cc, P(cub, "comp(A, P, \\x i. a i, a i0, \\x. refl (a i0))"), P(cub, "a i1"),
                    P(cub, "el(A i1)")));
  auto cn = C(cub, {{"A", "I -> Type"}, {"P", "Cof"}, {"a", "(i : I) -> el(A i)"}});
  CHECK_FALSE(check_equal(cub, cn, P(cub, "comp(A, P, \\x i. a i, a i0, \\x. refl (a i0))"), P(cub, "a i1"),
                          P(cub, "el(A i1)")));
  auto ec = C(cub, {{"i", "I"}, {"p", "true(eq0(i))"}});
  CHECK(check_equal(cub, ec, P(cub, "i"), P(cub, "i0"), P(cub, "I")));
}

TEST_CASE("context morphisms") {
  auto s = load("dtt");
  auto g = C(s, {{"A", "Type"}, {"a", "el(A)"}});
  CHECK(check_context_morphism(s, {mk_var("A"), mk_var("a")}, g, g).ok);
  CHECK(check_context_morphism(s, {}, g, {}).ok);
  auto r = check_context_morphism(s, {mk_var("A")}, g, g);
  CHECK(r.kind == ErrorKind::ArityMismatch);

  auto ab = C(s, {{"A", "Type"}, {"B", "Type"}});
  auto xy = C(s, {{"X", "Type"}, {"Y", "Type"}});
  CHECK_FALSE(morphisms_equal(s, ab, xy, {mk_var("A"), mk_var("A")}, {mk_var("A"), mk_var("B")}));
  CHECK(morphisms_equal(s, ab, xy, {mk_var("A"), mk_var("B")}, {mk_var("A"), mk_var("B")}));
}

TEST_CASE("signature weakening") {
  auto dtt = parse_signature(slurp("corpus/dtt.lfsig"));
  auto pi = parse_signature(slurp("corpus/pi.lfsig"));
  PreSignature ext;
  for (size_t i = 2; i < pi.entries.size(); ++i) ext.entries.push_back(pi.entries[i]);
  auto names = pi.symbol_names();
  PreContext ctx{{"A", parse_term("Type", &names)}};
  CHECK(weaken_signature(dtt, ext, {}, CtxOk{ctx}).ok);
  CHECK(weaken_signature(dtt, {}, {}, CtxOk{ctx}).ok);
  auto clash = weaken_signature(dtt, dtt, {}, SigOk{});
  CHECK(clash.kind == ErrorKind::DuplicateSymbol);
}
