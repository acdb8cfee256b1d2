#include <stdexcept>

#include "doctest.h"
#include "rmk/props/props.hpp"

using namespace rmk::props;

TEST_CASE("props: every suite passes a short run") {
  for (const auto& s : suite_names()) {
    CAPTURE(s);
    Params p;
    p.seed = 3;
    p.cases = s == "lf-substitution" ? 20 : 30;
    auto r = run_suite(s, p);
    CHECK(r.cases == p.cases);
    for (const auto& f : r.failures) MESSAGE(f);
    CHECK(r.ok());
  }
}

TEST_CASE("props: reports depend only on the parameters") {
  Params p;
  p.seed = 11;
  p.cases = 40;
  auto a = run_suite("bc-pullback", p);
  auto b = run_suite("bc-pullback", p);
  CHECK(a.notes == b.notes);
  p.seed = 12;
  auto c = run_suite("bc-pullback", p);
  CHECK(c.cases == 40);
  CHECK_THROWS_AS(run_suite("no-such-suite", p), std::invalid_argument);
}
