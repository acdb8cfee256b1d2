#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rmk/lf/syntax.hpp"

using namespace rmk::lf;

namespace {

const std::set<std::string> kSyms = {"Type", "el"};

TermPtr P(const std::string& s) { return parse_term(s, &kSyms); }

// Locally nameless conversion used as an independent reference for
// substitution: bound variables become indices, free ones keep their name.
struct DB {
  std::string repr;
};

std::string to_db(const TermPtr& t, std::vector<std::string>& env) {
  if (!t) return "?";
  auto under = [&](const std::string& x, const TermPtr& part) {
    env.push_back(x);
    std::string r = to_db(part, env);
    env.pop_back();
    return r;
  };
  switch (t->kind()) {
    case TermKind::Box: return "Box";
    case TermKind::Rep: return "Rep";
    case TermKind::Var:
      for (int i = static_cast<int>(env.size()) - 1; i >= 0; --i)
        if (env[i] == t->name()) return "#" + std::to_string(env.size() - 1 - i);
      return t->name();
    case TermKind::Sym: {
      std::string s = t->name() + "(";
      for (const auto& a : t->args()) s += to_db(a, env) + ",";
      return s + ")";
    }
    case TermKind::Pi: return "Pi(" + to_db(t->domain(), env) + "," + under(t->name(), t->codomain()) + ")";
    case TermKind::Abs: return "Lam(" + to_db(t->domain(), env) + "," + under(t->name(), t->body()) + ")";
    case TermKind::App:
      return "App(" + to_db(t->domain(), env) + "," + under(t->name(), t->codomain()) + "," +
             to_db(t->function(), env) + "," + to_db(t->argument(), env) + ")";
    case TermKind::Eq:
      return "Eq(" + to_db(t->eq_type(), env) + "," + to_db(t->lhs(), env) + "," + to_db(t->rhs(), env) + ")";
    case TermKind::Refl: return "Refl(" + to_db(t->subject(), env) + ")";
  }
  return "";
}

std::string db(const TermPtr& t) {
  std::vector<std::string> env;
  return to_db(t, env);
}

}  // namespace

TEST_CASE("parse_term examples") {
  auto t = P("(A : Type) -> Type");
  REQUIRE(t->is(TermKind::Pi));
  CHECK(t->name() == "A");
  CHECK(alpha_eq(t->domain(), mk_sym("Type")));
  CHECK(alpha_eq(t->codomain(), mk_sym("Type")));

  auto l = P("\\(x : el(A)). x");
  REQUIRE(l->is(TermKind::Abs));
  CHECK(alpha_eq(l->domain(), mk_sym("el", {mk_var("A")})));
  CHECK(alpha_eq(l->body(), mk_var("x")));

  auto r = P("refl a");
  REQUIRE(r->is(TermKind::Refl));
  CHECK(alpha_eq(r->subject(), mk_var("a")));
}

TEST_CASE("application, equations and arrows") {
  auto t = P("f a b = c in el(A) -> Type");
  REQUIRE(t->is(TermKind::Pi));
  CHECK(t->name() == "_");
  const auto& eq = t->domain();
  REQUIRE(eq->is(TermKind::Eq));
  CHECK(eq->lhs()->is(TermKind::App));
  CHECK(eq->lhs()->function()->is(TermKind::App));
  CHECK(print_term(t) == "f a b = c in el(A) -> Type");

  // f(a) is a symbol application, f (a) an ordinary one.
  CHECK(parse_term("f(a)")->is(TermKind::Sym));
  CHECK(parse_term("f (a)")->is(TermKind::App));

  auto multi = P("(x : el(A), y : el(A)) -> x = y");
  REQUIRE(multi->is(TermKind::Pi));
  CHECK(multi->codomain()->is(TermKind::Pi));
  CHECK(print_term(multi) == "(x : el(A)) -> (y : el(A)) -> x = y");
}

TEST_CASE("bound variables shadow symbols during resolution") {
  auto t = P("\\(el : el(Type)). el");
  REQUIRE(t->is(TermKind::Abs));
  CHECK(t->body()->is(TermKind::Var));
  auto u = P("\\el. el(x)");
  CHECK(u->body()->is(TermKind::App));
}

TEST_CASE("syntax errors carry positions") {
  try {
    parse_term("(A : Type) ->\n  )");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
  CHECK_THROWS_AS(parse_term("f(a,"), SyntaxError);
  CHECK_THROWS_AS(parse_term("a $ b"), SyntaxError);
  CHECK_THROWS_AS(parse_signature("x : (A : Type) =>\n"), SyntaxError);
}

TEST_CASE("alpha equivalence") {
  CHECK(alpha_eq(P("\\(x : A). x"), P("\\(y : A). y")));
  CHECK_FALSE(alpha_eq(P("\\(x : A). x"), P("\\(x : A). a")));
  CHECK_FALSE(alpha_eq(P("a = b in A"), P("b = a in A")));
  CHECK(alpha_eq(P("(x : el(A)) -> el(B x)"), P("(z : el(A)) -> el(B z)")));
  CHECK_FALSE(alpha_eq(P("\\x y. x"), P("\\x y. y")));
}

TEST_CASE("substitution") {
  CHECK(alpha_eq(substitute(mk_var("x"), "x", mk_var("b")), mk_var("b")));
  auto shadow = P("\\(x : A). x");
  CHECK(alpha_eq(substitute(shadow, "x", mk_var("b")), shadow));

  // ((y : B) -> y x)[y/x] must rename the binder.
  auto t = P("(y : B) -> y x");
  auto r = substitute(t, "x", mk_var("y"));
  REQUIRE(r->is(TermKind::Pi));
  CHECK(r->name() != "y");
  CHECK(free_vars(r) == std::set<std::string>{"B", "y"});
  CHECK(db(r) == "Pi(B,App(?,?,#0,y))");
}

TEST_CASE("printing round-trips the corpus") {
  for (const char* name : {"dtt", "pi", "id", "universes", "twolevel", "prop", "predicate", "cubical"}) {
    std::ifstream in(std::string(RMK_SOURCE_DIR) + "/corpus/" + name + ".lfsig");
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    auto sig = parse_signature(ss.str());
    auto again = parse_signature(print_signature(sig));
    REQUIRE(again.entries.size() == sig.entries.size());
    for (size_t i = 0; i < sig.entries.size(); ++i) {
      const auto& a = sig.entries[i];
      const auto& b = again.entries[i];
      CHECK(a.name == b.name);
      CHECK(a.sort == b.sort);
      REQUIRE(a.context.size() == b.context.size());
      for (size_t k = 0; k < a.context.size(); ++k) CHECK(alpha_eq(a.context[k].second, b.context[k].second));
      if (a.type) CHECK(alpha_eq(a.type, b.type));
    }
  }
}

TEST_CASE("anonymous entries get fresh names") {
  auto sig = parse_signature("Type : () => Box\n_ : () => Type\n_ : () => Type\n");
  REQUIRE(sig.entries.size() == 3);
  CHECK(sig.entries[1].name == "_eq1");
  CHECK(sig.entries[2].name == "_eq2");
}
