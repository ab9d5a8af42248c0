#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sublex {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string details;
};

/// Runs the full acceptance gate (ten criteria, fixed seeds, tolerances
/// pinned in the implementation) and prints one [PASS]/[FAIL] line per
/// criterion to `log` as it goes.
std::vector<CriterionResult> run_acceptance(std::ostream& log);

bool all_passed(const std::vector<CriterionResult>& results);

/// Canonical payload object for the report envelope.
std::string acceptance_payload_json(const std::vector<CriterionResult>& results);

}  // namespace sublex
