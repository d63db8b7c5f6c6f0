#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ccgeod/chart.hpp"
#include "ccgeod/states.hpp"

namespace ccgeod {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  long max_steps = 1000000;
  // |tau| below which the final boundary step is taken in one explicit move
  double tau_min = 1e-12;
  double initial_step = 1e-6;
  long record_stride = 1;
  // 0 disables the cap; set to force dense sampling for interpolation work
  double max_step = 0.0;
  // handoff threshold for the arclength flow, as a fraction of delta
  double x_stop_fraction = 1e-3;
  // below this w0 a tau-trajectory is declared out of the inbound regime
  double w0_min = 1e-3;
  // >0 switches the driver to fixed steps (order measurements)
  double fixed_step = 0.0;

  void validate() const;
};

enum class Termination {
  reached_boundary,
  left_chart,
  left_inbound_regime,
  step_failure,
  // integrated to the requested parameter endpoint (t_max or tau_end)
  reached_limit,
};

enum class ParamKind { arclength, tau };

std::string to_string(Termination t);
std::string to_string(ParamKind k);

struct Trajectory {
  ParamKind parameter_kind = ParamKind::tau;
  std::vector<double> params;
  std::vector<Vec> states;  // packed per systems.hpp
  Termination termination = Termination::step_failure;
  std::string chart_id;
  int boundary_dim = 0;

  size_t size() const { return params.size(); }
  TauState tau_state(size_t i) const;
  CotangentState cotangent_state(size_t i) const;
  double front_param() const { return params.front(); }
  double back_param() const { return params.back(); }

  // Piecewise-linear interpolation of the packed state at a parameter value
  // inside the recorded range.
  Vec interpolate(double param) const;
};

using RhsFn = std::function<void(double, const Vec&, Vec&)>;

struct DriverCallbacks {
  // stop with reached_boundary when this crosses zero from below
  std::function<double(double, const Vec&)> event;
  // stop with left_chart when this becomes negative
  std::function<double(double, const Vec&)> chart_margin;
  // stop with left_inbound_regime when this becomes negative
  std::function<double(double, const Vec&)> inbound_margin;
};

struct DriveOutcome {
  double t = 0.0;
  Vec y;
  Termination termination = Termination::step_failure;
  bool event_hit = false;
  long accepted_steps = 0;
};

// Adaptive Dormand-Prince 5(4) driver with PI step control (safety 0.9,
// growth clamp [0.2, 5]).  Stops at t_end, on a zero crossing of the event
// function (bisected until |event| <= 1e-12), or on a guard violation.
// Right-hand-side exceptions reject the step and shrink it.
DriveOutcome integrate_ode(const RhsFn& rhs, double t0, const Vec& y0, double t_end,
                           const IntegratorConfig& cfg, const DriverCallbacks& callbacks = {},
                           const std::function<void(double, const Vec&)>& record = nullptr);

// Integrate a tau-parametrized system whose right side extends continuously
// to tau = 0, from tau0 < 0 all the way to tau = 0: adaptive until
// |tau| <= tau_min, then one explicit Heun step using the extension.
DriveOutcome integrate_to_zero(const RhsFn& rhs, double tau0, const Vec& y0,
                               const IntegratorConfig& cfg, const DriverCallbacks& callbacks = {},
                               const std::function<void(double, const Vec&)>& record = nullptr);

// Arclength cogeodesic flow from an on-shell state (|2H - 1| <= 1e-8
// required).  Stops at t_max, at the handoff event x^0 >= -x_stop
// (x_stop = x_stop_fraction * delta), or on chart exit.
Trajectory integrate_t(const FermiChart& chart, const CotangentState& s0, double t_max,
                       const IntegratorConfig& cfg);

// Boundary-regular flow from tau < 0 up to tau = 0; the final sample has
// tau = 0 exactly.
Trajectory integrate_tau_to_boundary(const FermiChart& chart, const TauState& s0,
                                     const IntegratorConfig& cfg);

// Boundary-regular flow started on the boundary: initial state
// (tau = 0, x' = q, w0 = 1, w = w_init), first step explicit order-2 with
// step initial_step * 1e-4, then adaptive down to tau_end < 0.
Trajectory integrate_tau_from_boundary(const FermiChart& chart, const BoundaryPoint& q,
                                       const Vec& w_init, double tau_end,
                                       const IntegratorConfig& cfg);

// Packed right side of the boundary-regular system for a chart.
RhsFn make_tau_rhs(const FermiChart& chart);

}  // namespace ccgeod
