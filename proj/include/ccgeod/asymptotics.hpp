#pragma once

#include <utility>
#include <vector>

#include "ccgeod/chart.hpp"
#include "ccgeod/integrate.hpp"

namespace ccgeod {

// Coefficient of the tau^2 log|tau| term in the boundary expansion of
// geodesics ending at q: -(1/2) h^{ab} kappa_b / kappa.  Vanishes
// identically on a connected boundary exactly when the metric is
// asymptotically hyperbolic.
Vec obstruction(const FermiChart& chart, const BoundaryPoint& q);

struct AhReport {
  bool asymptotically_hyperbolic = false;
  double sup_obstruction = 0.0;
};

AhReport is_asymptotically_hyperbolic(const FermiChart& chart,
                                      const std::vector<BoundaryPoint>& sample_points,
                                      double tol = 1e-8);

struct ExpansionFit {
  Vec obstruction;   // fitted coefficient of tau^2 log|tau|, per component
  Vec quadratic;     // fitted coefficient of tau^2 (the vector u)
  // cubic nuisance coefficients {tau^3 log|tau|, tau^3} per component;
  // reported for diagnostics, never part of the extracted data
  std::vector<std::pair<double, double>> nuisance;
  std::pair<double, double> window{0.0, 0.0};  // (tau_lo, tau_hi), both < 0
  double residual_rms = 0.0;
  double condition = 0.0;  // collinearity of the weighted basis
};

// Weighted least squares of x^a(tau) - x^a(0) against {tau^2 log|tau|,
// tau^2} (plus {tau^3 log|tau|, tau^3} as discarded nuisance terms when
// requested), with weights 1/tau^4.  The trajectory must contain a tau = 0
// sample and at least 30 samples inside the window.
ExpansionFit fit_expansion(const Trajectory& traj, std::pair<double, double> window,
                           bool include_nuisance = true);

// Default fit window |tau| in [1e-3, 1e-2].
inline std::pair<double, double> default_fit_window() { return {-1e-2, -1e-3}; }

struct LipschitzReport {
  double max_ratio = 0.0;
  double c_est = 0.0;
  double interval_len = 0.0;
  bool bound_ok = false;  // max_ratio <= e
};

// Largest ||rhs(tau, y1) - rhs(tau, y2)|| / ||y1 - y2|| over sampled state
// pairs drawn from the box [lo, hi] at taus in [tau_lo, tau_hi].
double estimate_rhs_lipschitz(const RhsFn& rhs, double tau_lo, double tau_hi, const Vec& lo,
                              const Vec& hi, int n_samples, unsigned seed);

// Integrates each pair over [t0, t0 + interval_len] and reports the largest
// displacement ratio.  Requires interval_len < 1/c_est.
LipschitzReport flow_lipschitz_check(const RhsFn& rhs, double t0, double interval_len,
                                     const std::vector<std::pair<Vec, Vec>>& pairs, double c_est,
                                     const IntegratorConfig& cfg);

struct TauStatePair {
  TauState first, second;
};

// Chart-level wrapper over the boundary-regular system; c_est is estimated
// from finite differences of the right side over the pairs' bounding box.
LipschitzReport flow_lipschitz_check(const FermiChart& chart, double tau0, double interval_len,
                                     const std::vector<TauStatePair>& state_pairs,
                                     const IntegratorConfig& cfg);

struct FlowC1Report {
  std::vector<double> fd_steps;
  std::vector<Mat> fd_jacobians;  // divided-difference flow Jacobians
  Mat variational_jacobian;       // from the augmented linearized system
  double max_discrepancy = 0.0;   // finest divided difference vs variational
  double observed_order = 0.0;    // h-refinement order of the divided differences
};

// Flow-map Jacobian d theta(tau1; tau0, y)/dy two ways: central divided
// differences of the flow at the given steps, and integration of the
// augmented system Y' = D_yV(tau, y) Y with D_yV from finite differences of
// the right side.
FlowC1Report flow_c1_check(const FermiChart& chart, double tau0, double tau1,
                           const TauState& base_state, const IntegratorConfig& cfg,
                           std::vector<double> fd_steps = {1e-4, 5e-5, 2.5e-5});

// Generic version used for reference systems in the tests.
FlowC1Report flow_c1_check_ode(const RhsFn& rhs, double t0, double t1, const Vec& y0,
                               const IntegratorConfig& cfg, std::vector<double> fd_steps,
                               bool endpoint_is_boundary);

}  // namespace ccgeod
