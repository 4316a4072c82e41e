// Named self-check suites over every module, runnable from the command
// line.  Each case derives its randomness from (seed, case name), so a
// fixed config produces a byte-identical report no matter how many worker
// threads execute the cases.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace thetaquant {

struct RunConfig {
  int g = 1;                      // genus for the genus-generic cases, 1..4
  int k = 2;                      // level for the level-generic cases, 1..8
  std::uint64_t seed = 1;         // base seed; cases mix in their name
  int threads = 0;                // 0 = THETAQUANT_THREADS env or a small default
};

void validate(const RunConfig& config);

int resolve_threads(const RunConfig& config);

struct CaseResult {
  std::string name;
  bool passed = false;
  double residual = 0.0;   // measured deviation
  double tolerance = 0.0;  // gate it was compared against
  std::string detail;      // error text or extra context; deterministic
};

struct SuiteReport {
  std::string suite;
  std::vector<CaseResult> cases;
  bool passed = false;
};

// Suites in fixed order; "all" expands to every one of these.
const std::vector<std::string>& suite_names();

SuiteReport run_suite(const std::string& name, const RunConfig& config);

// name may be a suite or "all".
std::vector<SuiteReport> run_suites(const std::string& name, const RunConfig& config);

// Fixed sign/branch conventions embedded in every report, so archived
// outputs stay interpretable.
const std::vector<std::pair<std::string, std::string>>& convention_notes();

std::string render_text_report(const std::vector<SuiteReport>& reports, const RunConfig& config);

bool all_passed(const std::vector<SuiteReport>& reports);

}  // namespace thetaquant
