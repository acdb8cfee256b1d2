#pragma once

#include <cstdint>
#include <random>

#include "rmk/cat/dfib.hpp"

namespace rmk::cat {

// Seeded generator. Uses plain modular reduction so sequences are identical
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  int below(int n) { return n <= 0 ? 0 : static_cast<int>(gen_() % static_cast<std::uint64_t>(n)); }
  int between(int lo, int hi) { return lo + below(hi - lo + 1); }
  bool chance(int percent) { return below(100) < percent; }
  std::uint64_t next() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

// A random small category with 1..max_objects objects: a preorder, a free
// category on a DAG, or one with a non-trivial idempotent or involution.
FinCat random_category(Rng& rng, int max_objects, const std::string& name = "B");
// A random preorder with all binary meets and a top element.
FinCat random_meet_semilattice(Rng& rng, int max_objects, const std::string& name = "L");
// Random fibration with fibers of at most max_fiber elements. Retries until a
// consistent restriction table is found.
DFib random_dfib(Rng& rng, const CatRef& base, int max_fiber, const std::string& name = "D");

}  // namespace rmk::cat
