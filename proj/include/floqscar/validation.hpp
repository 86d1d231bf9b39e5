#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace floqscar {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// Built-in invariants that need no reference numbers: Floquet unitarity,
/// stroboscopic equivalence, zero entropy of Fock states, degeneracy-phase
/// antisymmetry and Um independence, norm conservation.
std::vector<CheckResult> run_property_suite();

/// Property suite plus the basis dimension and degenerate-set counts.
std::vector<CheckResult> run_validation_suite();

/// Runs one named check; an exception counts as a failure.
CheckResult run_check(const std::string& name, const std::function<CheckResult()>& body);

/// "PASS name  measured=... threshold=... detail" per line.
void print_checks(std::ostream& out, const std::vector<CheckResult>& checks);
bool all_passed(const std::vector<CheckResult>& checks);

} // namespace floqscar
