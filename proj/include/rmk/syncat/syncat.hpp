#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rmk/cat/fincat.hpp"
#include "rmk/lf/checker.hpp"

namespace rmk::syncat {

struct Bounds {
  int depth = 2;              // variables per context
  int size = 4;               // term size of context types and morphism components
  size_t max_count = 200000;  // candidate terms and tuples, in total
};

std::string to_string(const Bounds& b);

// Variables are x1, x2, ... in order.
struct SynContext {
  lf::Context ctx;
  bool representable_last = false;  // last type has sort Rep
};

struct SynArrow {
  int src = 0;
  int tgt = 0;
  std::vector<lf::TermPtr> rep;  // shortest member found first
  size_t members = 0;
  bool generating = false;     // class of a projection (G, x : A) -> G with A : Rep
  bool representable = false;  // composite of generators and isomorphisms within bounds
};

struct SynCat {
  Bounds bounds;
  std::vector<SynContext> contexts;
  std::vector<SynArrow> arrows;
  std::vector<int> identity;                 // per context
  std::vector<std::vector<int>> composite;   // [g][f], -1 when not composable or not found
  std::optional<cat::FinCat> cat;            // when composition closes within bounds
  bool overflow = false;
  bool equality_incomplete = false;
  size_t candidates = 0;
  std::vector<std::string> caveats;

  std::vector<int> hom(int a, int b) const;
  std::optional<int> find_context(const lf::Context& c) const;  // up to alpha-equivalence
};

SynCat build_syncat(const lf::CheckedSignature& sig, const Bounds& bounds = {});

// Class of the tuple f : G -> D, if it is one of the enumerated classes.
std::optional<int> find_class(const lf::CheckedSignature& sig, const SynCat& sc, int g, int d,
                              const std::vector<lf::TermPtr>& f);

bool check_terminal(const SynCat& sc);
std::vector<int> generating_representables(const SynCat& sc);

struct PullbackCheck {
  int generator = -1;  // (D, y : B) -> D
  int along = -1;      // s : G -> D
  int apex = -1;       // (G, x : B[s]), or -1 when outside the bounds
  int p1 = -1;         // apex -> (D, y : B)
  int p2 = -1;         // apex -> G
  bool verified = false;
  std::string note;
};

PullbackCheck pullback_of(const lf::CheckedSignature& sig, const SynCat& sc, int generator, int along);

struct PullbackReport {
  std::vector<PullbackCheck> checks;
  size_t verified = 0;
  size_t out_of_bounds = 0;
  bool ok() const { return verified + out_of_bounds == checks.size(); }
};
PullbackReport check_representable_pullbacks(const lf::CheckedSignature& sig, const SynCat& sc);

std::string context_text(const SynContext& c);
std::string arrow_text(const SynCat& sc, int a);
// `.fincat` text of the bounded category; requires sc.cat.
std::string fincat_dump(const SynCat& sc);

}  // namespace rmk::syncat
