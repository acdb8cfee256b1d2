#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rmk::props {

struct Params {
  std::uint64_t seed = 1;
  int size = 3;  // largest base, in objects
  int cases = 100;
};

struct SuiteReport {
  std::string suite;
  Params params;
  int cases = 0;
  int passed = 0;
  std::vector<std::string> failures;  // first few, with the case index
  std::vector<std::string> notes;     // suite-specific tallies

  bool ok() const { return passed == cases; }
};

// dfib-laws, pushforward-ump, bc-pullback, model-laws, democratic,
// contractibility, lf-substitution
const std::vector<std::string>& suite_names();

// Deterministic in (suite, params). Throws std::invalid_argument for an
// unknown suite.
SuiteReport run_suite(const std::string& suite, const Params& params);

// Directory holding the signature corpus (corpus/*.lfsig).
std::string corpus_dir();

}  // namespace rmk::props
