#pragma once

#include <stdexcept>
#include <string>

namespace ccgeod {

// Bad coordinates, parameters outside their stated ranges, malformed input.
class domain_error : public std::invalid_argument {
public:
  explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

// Metric data violating the chart contract (rho <= 0 in the interior, h not SPD, ...).
class chart_integrity_error : public std::runtime_error {
public:
  explicit chart_integrity_error(const std::string& what) : std::runtime_error(what) {}
};

// Quadrature non-convergence, singular linear solves and similar numerical breakdowns.
class numeric_error : public std::runtime_error {
public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Regression diagnostics: ill-conditioned windows, too few samples.
class fit_error : public std::runtime_error {
public:
  explicit fit_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ccgeod
