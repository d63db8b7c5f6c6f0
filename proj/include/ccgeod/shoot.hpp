#pragma once

#include <map>
#include <string>

#include "ccgeod/chart.hpp"
#include "ccgeod/integrate.hpp"
#include "ccgeod/states.hpp"

namespace ccgeod {

struct ShootResult {
  BoundaryPoint endpoint;
  Trajectory trajectory;            // tau phase, ends at tau = 0 on success
  Trajectory arclength_trajectory;  // arclength phase up to the handoff
  TauState handoff;
  std::map<std::string, double> diagnostics;
  Termination termination = Termination::step_failure;

  bool ok() const { return termination == Termination::reached_boundary; }
};

// Two-phase shot toward the boundary: the arclength flow runs to the
// handoff event x^0 >= -x_stop, the state is converted, and the
// boundary-regular flow carries it to tau = 0.  The direction v (given in
// coordinates) is normalized to a g-unit vector internally; its x^0
// component must be positive.  On integrator terminations other than
// reached_boundary the result carries the partial trajectories and the
// failing termination.
ShootResult endpoint_map(const FermiChart& chart, const Vec& p, const Vec& v,
                         const IntegratorConfig& cfg);

struct EndpointJacobian {
  Mat jacobian;          // d(endpoint coords) / d(direction angles), n x n
  double smallest_singular_value = 0.0;
  double fd_step = 0.0;
};

// Central differences of endpoint_map over an h-orthonormal basis of the
// orthogonal complement of v in the unit sphere at p; angles measure
// rotations of v toward each basis vector.  Throws numeric_error if any
// shot fails.
EndpointJacobian endpoint_jacobian(const FermiChart& chart, const Vec& p, const Vec& v,
                                   const IntegratorConfig& cfg, double fd_step = 1e-4);

// Shot from the boundary with prescribed quadratic coefficient u of the
// expansion: the initial w is kappa^a/(2 kappa^2) - 2 u^a / kappa at q.
Trajectory boundary_shoot(const FermiChart& chart, const BoundaryPoint& q, const Vec& u,
                          double tau_end, const IntegratorConfig& cfg);

// Least-squares slope of log rho versus t over [t_lo, t_hi] on an
// arclength trajectory; approximately -kappa at the limiting endpoint.
// Throws fit_error when the window holds fewer than 10 samples.
double rho_decay_rate(const FermiChart& chart, const Trajectory& traj, double t_lo, double t_hi);

}  // namespace ccgeod
