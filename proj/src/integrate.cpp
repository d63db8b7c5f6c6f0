#include "ccgeod/integrate.hpp"

#include <algorithm>
#include <cmath>

#include "ccgeod/errors.hpp"
#include "ccgeod/systems.hpp"

namespace ccgeod {

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw domain_error("integrator tolerances must be positive");
  if (!(tau_min > 0.0) || !(initial_step > 0.0))
    throw domain_error("tau_min and initial_step must be positive");
  if (tau_min >= initial_step)
    throw domain_error("tau_min must be smaller than initial_step");
  if (max_steps <= 0) throw domain_error("max_steps must be positive");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::reached_boundary: return "reached_boundary";
    case Termination::left_chart: return "left_chart";
    case Termination::left_inbound_regime: return "left_inbound_regime";
    case Termination::step_failure: return "step_failure";
    case Termination::reached_limit: return "reached_limit";
  }
  return "unknown";
}

std::string to_string(ParamKind k) {
  return k == ParamKind::arclength ? "arclength" : "tau";
}

TauState Trajectory::tau_state(size_t i) const {
  return unpack_tau(params[i], states[i], boundary_dim);
}

CotangentState Trajectory::cotangent_state(size_t i) const {
  return unpack_cotangent(params[i], states[i], boundary_dim);
}

Vec Trajectory::interpolate(double param) const {
  if (params.size() < 2) throw domain_error("trajectory too short to interpolate");
  const bool increasing = params.back() > params.front();
  const double lo = increasing ? params.front() : params.back();
  const double hi = increasing ? params.back() : params.front();
  if (param < lo - 1e-14 || param > hi + 1e-14)
    throw domain_error("interpolation parameter outside trajectory range");
  size_t i = 1;
  if (increasing) {
    while (i + 1 < params.size() && params[i] < param) i++;
  } else {
    while (i + 1 < params.size() && params[i] > param) i++;
  }
  const double p0 = params[i - 1], p1 = params[i];
  const double f = (p1 == p0) ? 0.0 : (param - p0) / (p1 - p0);
  Vec out(states[i - 1].size());
  for (size_t j = 0; j < out.size(); j++)
    out[j] = (1.0 - f) * states[i - 1][j] + f * states[i][j];
  return out;
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

struct Stepper {
  const RhsFn& rhs;
  size_t m;
  Vec k2, k3, k4, k5, k6, k7, tmp;

  explicit Stepper(const RhsFn& f, size_t dim)
      : rhs(f), m(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), tmp(dim) {}

  // One step from (t, y) with derivative k1 already evaluated.  Fills y5
  // (5th-order solution) and err (embedded difference); k7 = f(t+h, y5) is
  // the FSAL derivative.
  void step(double t, const Vec& y, const Vec& k1, double h, Vec& y5, Vec& err) {
    for (size_t i = 0; i < m; i++) tmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, tmp, k2);
    for (size_t i = 0; i < m; i++) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, tmp, k3);
    for (size_t i = 0; i < m; i++)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, tmp, k4);
    for (size_t i = 0; i < m; i++)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * h, tmp, k5);
    for (size_t i = 0; i < m; i++)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(t + h, tmp, k6);
    y5.resize(m);
    for (size_t i = 0; i < m; i++)
      y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(t + h, y5, k7);
    err.resize(m);
    for (size_t i = 0; i < m; i++)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  }
};

double error_norm(const Vec& err, const Vec& y, const Vec& y_new, const IntegratorConfig& cfg) {
  double s = 0.0;
  for (size_t i = 0; i < err.size(); i++) {
    const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
    const double r = err[i] / scale;
    s += r * r;
  }
  return std::sqrt(s / err.size());
}

constexpr double kEventTol = 1e-12;

}  // namespace

DriveOutcome integrate_ode(const RhsFn& rhs, double t0, const Vec& y0, double t_end,
                           const IntegratorConfig& cfg, const DriverCallbacks& cb,
                           const std::function<void(double, const Vec&)>& record) {
  cfg.validate();
  const double dir = (t_end >= t0) ? 1.0 : -1.0;
  DriveOutcome out;
  out.t = t0;
  out.y = y0;
  if (record) record(t0, y0);
  if (t0 == t_end) {
    out.termination = Termination::reached_limit;
    return out;
  }

  Stepper st(rhs, y0.size());
  Vec k1(y0.size()), y5, err;
  try {
    rhs(t0, out.y, k1);
  } catch (const std::exception&) {
    out.termination = Termination::step_failure;
    return out;
  }

  double h = dir * (cfg.fixed_step > 0.0 ? cfg.fixed_step : cfg.initial_step);
  if (cfg.max_step > 0.0 && std::abs(h) > cfg.max_step) h = dir * cfg.max_step;
  double err_prev = 1.0;
  const double h_floor = 1e-15 * std::max(1.0, std::abs(t_end - t0));
  long rec_count = 0;

  // Bisect within the last step for the parameter fraction where fn crosses
  // zero (fn > 0 at fraction 0).  Keeps the last state on the positive side,
  // so the returned sample is at most the event tolerance short of the
  // crossing and always evaluable.
  auto bisect_to = [&](const std::function<double(double, const Vec&)>& fn, double h_acc,
                       double& t_cross, Vec& y_cross) {
    double lo = 0.0, hi = 1.0;
    double t_best = out.t;
    Vec y_best = out.y;
    Vec y_mid, e_mid;
    for (int it = 0; it < 100; it++) {
      const double mid = 0.5 * (lo + hi);
      double g;
      bool mid_ok = true;
      try {
        st.step(out.t, out.y, k1, mid * h_acc, y_mid, e_mid);
        g = fn(out.t + mid * h_acc, y_mid);
      } catch (const std::exception&) {
        g = -1.0;  // unevaluable counts as past the crossing
        mid_ok = false;
      }
      if (mid_ok && g > 0.0) {
        t_best = out.t + mid * h_acc;
        y_best = y_mid;
        if (g <= kEventTol) break;
      }
      (g > 0.0 ? lo : hi) = mid;
      if (hi - lo < 1e-15) break;
    }
    t_cross = t_best;
    y_cross = y_best;
  };

  while (true) {
    if (out.accepted_steps >= cfg.max_steps) {
      out.termination = Termination::step_failure;
      return out;
    }
    if ((out.t + h - t_end) * dir > 0.0) h = t_end - out.t;

    bool ok = true;
    try {
      st.step(out.t, out.y, k1, h, y5, err);
    } catch (const std::exception&) {
      ok = false;
    }
    double en = ok ? error_norm(err, out.y, y5, cfg) : 2.0;
    if (!std::isfinite(en)) {
      ok = false;
      en = 2.0;
    }
    const bool accept = cfg.fixed_step > 0.0 ? ok : (ok && en <= 1.0);

    if (accept) {
      // guard checks on the landing point
      if (cb.inbound_margin && cb.inbound_margin(out.t + h, y5) <= 0.0) {
        double tc;
        Vec yc;
        const double t_prev = out.t;
        bisect_to(cb.inbound_margin, h, tc, yc);
        out.t = tc;
        out.y = yc;
        if (record && out.t != t_prev) record(out.t, out.y);
        out.termination = Termination::left_inbound_regime;
        return out;
      }
      if (cb.chart_margin && cb.chart_margin(out.t + h, y5) <= 0.0) {
        double tc;
        Vec yc;
        const double t_prev = out.t;
        bisect_to(cb.chart_margin, h, tc, yc);
        out.t = tc;
        out.y = yc;
        if (record && out.t != t_prev) record(out.t, out.y);
        out.termination = Termination::left_chart;
        return out;
      }
      if (cb.event && cb.event(out.t + h, y5) >= 0.0) {
        double tc;
        Vec yc;
        const double t_prev = out.t;
        bisect_to([&](double t, const Vec& y) { return -cb.event(t, y); }, h, tc, yc);
        out.t = tc;
        out.y = yc;
        if (record && out.t != t_prev) record(out.t, out.y);
        out.event_hit = true;
        out.termination = Termination::reached_boundary;
        return out;
      }

      out.t += h;
      out.y = y5;
      k1 = st.k7;  // FSAL
      out.accepted_steps++;
      if (record && (++rec_count % std::max<long>(1, cfg.record_stride) == 0 || out.t == t_end))
        record(out.t, out.y);

      if (out.t == t_end) {
        out.termination = Termination::reached_limit;
        return out;
      }
      if (cfg.fixed_step <= 0.0) {
        double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.7 / 5.0) *
                     std::pow(std::max(err_prev, 1e-10), 0.4 / 5.0);
        fac = std::clamp(fac, 0.2, 5.0);
        h *= fac;
        if (cfg.max_step > 0.0 && std::abs(h) > cfg.max_step) h = dir * cfg.max_step;
        err_prev = std::max(en, 1e-10);
      }
    } else {
      h *= ok ? std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.5) : 0.3;
      if (std::abs(h) < h_floor) {
        out.termination = Termination::step_failure;
        return out;
      }
    }
  }
}

DriveOutcome integrate_to_zero(const RhsFn& rhs, double tau0, const Vec& y0,
                               const IntegratorConfig& cfg, const DriverCallbacks& cb,
                               const std::function<void(double, const Vec&)>& record) {
  cfg.validate();
  if (!(tau0 < 0.0)) throw domain_error("integrate_to_zero requires tau0 < 0");

  DriveOutcome out;
  if (tau0 < -cfg.tau_min) {
    out = integrate_ode(rhs, tau0, y0, -cfg.tau_min, cfg, cb, record);
    if (out.termination != Termination::reached_limit) return out;
  } else {
    out.t = tau0;
    out.y = y0;
    if (record) record(tau0, y0);
  }

  // One Heun step over the remaining sliver, using the continuous extension
  // of the right side at tau = 0.  The error estimators of the embedded pair
  // stall in the log region, so adaptivity is not used here.
  const size_t m = out.y.size();
  Vec f0(m), f1(m), pred(m);
  rhs(out.t, out.y, f0);
  const double h = -out.t;
  for (size_t i = 0; i < m; i++) pred[i] = out.y[i] + h * f0[i];
  rhs(0.0, pred, f1);
  for (size_t i = 0; i < m; i++) out.y[i] += 0.5 * h * (f0[i] + f1[i]);
  out.t = 0.0;
  if (record) record(0.0, out.y);
  out.termination = Termination::reached_boundary;
  return out;
}

RhsFn make_tau_rhs(const FermiChart& chart) {
  const int n = chart.boundary_dim();
  return [&chart, n](double tau, const Vec& y, Vec& dydt) {
    const TauState s = unpack_tau(tau, y, n);
    const TauRhs r = rhs_tau_regular(chart, s);
    dydt.resize(2 * n + 1);
    for (int a = 0; a < n; a++) dydt[a] = r.dx_prime[a];
    dydt[n] = r.dw0;
    for (int a = 0; a < n; a++) dydt[n + 1 + a] = r.dw[a];
  };
}

namespace {

DriverCallbacks tau_callbacks(const FermiChart& chart, const IntegratorConfig& cfg) {
  const int n = chart.boundary_dim();
  const auto box = chart.x_box();
  DriverCallbacks cb;
  cb.inbound_margin = [&chart, cfg, n](double, const Vec& y) { return y[n] - cfg.w0_min; };
  cb.chart_margin = [box, n](double, const Vec& y) {
    double m = 1e300;
    for (int a = 0; a < n; a++) {
      m = std::min(m, y[a] - box[a].first);
      m = std::min(m, box[a].second - y[a]);
    }
    return m;
  };
  return cb;
}

}  // namespace

Trajectory integrate_t(const FermiChart& chart, const CotangentState& s0, double t_max,
                       const IntegratorConfig& cfg) {
  cfg.validate();
  if (s0.x[0] >= 0.0) throw domain_error("integrate_t requires x^0 < 0");
  chart.require_inside(s0.x);
  if (std::abs(energy(chart, s0) - 1.0) > 1e-8)
    throw domain_error("integrate_t requires an on-shell state (|2H - 1| <= 1e-8)");

  const int n = chart.boundary_dim();
  const double x_stop = cfg.x_stop_fraction * chart.delta();
  const auto box = chart.x_box();
  const double x0_min = chart.x0_min();

  RhsFn rhs = [&chart, n](double t, const Vec& y, Vec& dydt) {
    const CotangentState s = unpack_cotangent(t, y, n);
    const CotangentRhs r = rhs_cogeodesic(chart, s);
    dydt.resize(2 * (n + 1));
    for (int i = 0; i <= n; i++) dydt[i] = r.dx[i];
    for (int i = 0; i <= n; i++) dydt[n + 1 + i] = r.dxi[i];
  };

  DriverCallbacks cb;
  cb.event = [x_stop](double, const Vec& y) { return y[0] + x_stop; };
  cb.chart_margin = [box, x0_min, n](double, const Vec& y) {
    double m = y[0] - x0_min;
    for (int a = 0; a < n; a++) {
      m = std::min(m, y[a + 1] - box[a].first);
      m = std::min(m, box[a].second - y[a + 1]);
    }
    return m;
  };

  Trajectory traj;
  traj.parameter_kind = ParamKind::arclength;
  traj.chart_id = chart.id();
  traj.boundary_dim = n;
  auto rec = [&traj](double t, const Vec& y) {
    traj.params.push_back(t);
    traj.states.push_back(y);
  };

  DriveOutcome res = integrate_ode(rhs, s0.t, pack(s0), s0.t + t_max, cfg, cb, rec);
  traj.termination = res.termination;
  return traj;
}

Trajectory integrate_tau_to_boundary(const FermiChart& chart, const TauState& s0,
                                     const IntegratorConfig& cfg) {
  cfg.validate();
  if (!(s0.w0 > 0.0)) throw domain_error("integrate_tau_to_boundary requires w0 > 0");
  if (!(s0.tau < 0.0)) throw domain_error("integrate_tau_to_boundary requires tau < 0");
  chart.require_inside(s0.coordinates());

  Trajectory traj;
  traj.parameter_kind = ParamKind::tau;
  traj.chart_id = chart.id();
  traj.boundary_dim = chart.boundary_dim();
  auto rec = [&traj](double t, const Vec& y) {
    traj.params.push_back(t);
    traj.states.push_back(y);
  };

  DriveOutcome res = integrate_to_zero(make_tau_rhs(chart), s0.tau, pack(s0), cfg,
                                       tau_callbacks(chart, cfg), rec);
  traj.termination = res.termination;
  return traj;
}

Trajectory integrate_tau_from_boundary(const FermiChart& chart, const BoundaryPoint& q,
                                       const Vec& w_init, double tau_end,
                                       const IntegratorConfig& cfg) {
  cfg.validate();
  const int n = chart.boundary_dim();
  if (!(tau_end < 0.0) || tau_end < -chart.delta())
    throw domain_error("integrate_tau_from_boundary requires tau_end in [-delta, 0)");
  TauState s0;
  s0.tau = 0.0;
  s0.x_prime = q.x_prime;
  s0.w0 = 1.0;
  s0.w = w_init;
  chart.require_inside(s0.coordinates());

  Trajectory traj;
  traj.parameter_kind = ParamKind::tau;
  traj.chart_id = chart.id();
  traj.boundary_dim = n;
  auto rec = [&traj](double t, const Vec& y) {
    traj.params.push_back(t);
    traj.states.push_back(y);
  };

  RhsFn rhs = make_tau_rhs(chart);

  // Order-2 start through the log-derivative region: the right side is
  // continuous but not differentiable in tau at 0, so the embedded pair's
  // error estimate cannot be trusted for the first move.
  const double h0 = cfg.initial_step * 1e-4;
  Vec y = pack(s0);
  rec(0.0, y);
  const size_t m = y.size();
  Vec f0(m), f1(m), pred(m);
  rhs(0.0, y, f0);
  const double h = std::max(tau_end, -h0);  // signed step toward tau_end
  for (size_t i = 0; i < m; i++) pred[i] = y[i] + h * f0[i];
  rhs(h, pred, f1);
  for (size_t i = 0; i < m; i++) y[i] += 0.5 * h * (f0[i] + f1[i]);
  rec(h, y);
  if (h == tau_end) {
    traj.termination = Termination::reached_limit;
    return traj;
  }

  DriveOutcome res = integrate_ode(rhs, h, y, tau_end, cfg, tau_callbacks(chart, cfg), rec);
  traj.termination = res.termination;
  return traj;
}

}  // namespace ccgeod
