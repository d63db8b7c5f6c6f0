#pragma once

#include <string>
#include <vector>

#include "ccgeod/chart.hpp"
#include "ccgeod/integrate.hpp"

namespace ccgeod {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Chart-integrity checks run over a sample grid of the domain: SPD of h,
// signs of rho, positivity of kappa, and the defining-function comparison
// rho / (-kappa x^0) -> 1.
std::vector<CheckResult> chart_integrity_checks(const FermiChart& chart);

// Cross-module invariant battery over the built-in charts (the epsilon
// family at 0, 0.5 and 1, and the warped constant-kappa chart): transport
// inverses, boundary limits, remainder stability, energy conservation along
// shots, the obstruction values, the flow Lipschitz bound and expansion
// fitting.  The seed only affects where random states are sampled.
std::vector<CheckResult> run_invariant_battery(unsigned seed, const IntegratorConfig& cfg);

std::string check_report_json(const std::vector<CheckResult>& results);
std::string check_report_table(const std::vector<CheckResult>& results);
bool all_passed(const std::vector<CheckResult>& results);

}  // namespace ccgeod
