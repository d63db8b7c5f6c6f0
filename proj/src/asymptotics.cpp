#include "ccgeod/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ccgeod/errors.hpp"
#include "ccgeod/systems.hpp"

namespace ccgeod {

Vec obstruction(const FermiChart& chart, const BoundaryPoint& q) {
  const double kap = kappa(chart, q.x_prime);
  const Vec grad = kappa_gradient(chart, q.x_prime);
  Vec x0(q.x_prime.size() + 1, 0.0);
  for (size_t i = 0; i < q.x_prime.size(); i++) x0[i + 1] = q.x_prime[i];
  Vec up = inverse(chart.h(x0)) * grad;
  for (auto& c : up) c *= -0.5 / kap;
  return up;
}

AhReport is_asymptotically_hyperbolic(const FermiChart& chart,
                                      const std::vector<BoundaryPoint>& sample_points,
                                      double tol) {
  if (sample_points.empty())
    throw domain_error("is_asymptotically_hyperbolic: no sample points");
  AhReport out;
  for (const auto& q : sample_points) {
    out.sup_obstruction = std::max(out.sup_obstruction, norm2(obstruction(chart, q)));
  }
  out.asymptotically_hyperbolic = out.sup_obstruction <= tol;
  return out;
}

ExpansionFit fit_expansion(const Trajectory& traj, std::pair<double, double> window,
                           bool include_nuisance) {
  if (traj.parameter_kind != ParamKind::tau)
    throw domain_error("fit_expansion needs a tau-parametrized trajectory");
  const int n = traj.boundary_dim;
  if (!(window.first < window.second) || window.second > 0.0)
    throw domain_error("fit_expansion: window must satisfy tau_lo < tau_hi < 0");

  // boundary values x(0)
  size_t zero_idx = traj.size();
  for (size_t i = 0; i < traj.size(); i++) {
    if (traj.params[i] == 0.0) {
      zero_idx = i;
      break;
    }
  }
  if (zero_idx == traj.size())
    throw domain_error("fit_expansion: trajectory does not reach tau = 0");
  const TauState at_zero = traj.tau_state(zero_idx);

  std::vector<double> taus;
  std::vector<Vec> xs;
  for (size_t i = 0; i < traj.size(); i++) {
    const double tau = traj.params[i];
    if (tau < window.first || tau > window.second) continue;
    taus.push_back(tau);
    xs.push_back(traj.tau_state(i).x_prime);
  }
  if (taus.size() < 30)
    throw fit_error("fit_expansion: window holds fewer than 30 samples");

  const int p = include_nuisance ? 4 : 2;
  const int m = static_cast<int>(taus.size());
  Mat design(m, p);
  for (int i = 0; i < m; i++) {
    const double tau = taus[i];
    const double lg = std::log(-tau);
    // weights 1/tau^4 applied as a 1/tau^2 row scaling
    design(i, 0) = lg;        // tau^2 log|tau| / tau^2
    design(i, 1) = 1.0;       // tau^2 / tau^2
    if (include_nuisance) {
      design(i, 2) = tau * lg;  // tau^3 log|tau| / tau^2
      design(i, 3) = tau;       // tau^3 / tau^2
    }
  }

  ExpansionFit out;
  out.window = window;
  out.obstruction.resize(n);
  out.quadratic.resize(n);
  double ss = 0.0;
  for (int a = 0; a < n; a++) {
    Vec rhs(m);
    for (int i = 0; i < m; i++) rhs[i] = (xs[i][a] - at_zero.x_prime[a]) / (taus[i] * taus[i]);
    const LeastSquaresResult ls = least_squares(design, rhs);
    if (ls.condition > 1e8)
      throw fit_error("fit_expansion: ill-conditioned window (condition > 1e8)");
    out.obstruction[a] = ls.coeffs[0];
    out.quadratic[a] = ls.coeffs[1];
    if (include_nuisance) out.nuisance.push_back({ls.coeffs[2], ls.coeffs[3]});
    out.condition = ls.condition;
    ss += ls.residual_rms * ls.residual_rms;
  }
  out.residual_rms = std::sqrt(ss / n);
  return out;
}

double estimate_rhs_lipschitz(const RhsFn& rhs, double tau_lo, double tau_hi, const Vec& lo,
                              const Vec& hi, int n_samples, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const size_t m = lo.size();
  Vec y1(m), y2(m), f1(m), f2(m);
  double c_est = 0.0;
  for (int s = 0; s < n_samples; s++) {
    const double tau = tau_lo + (tau_hi - tau_lo) * unit(rng);
    for (size_t i = 0; i < m; i++) {
      y1[i] = lo[i] + (hi[i] - lo[i]) * unit(rng);
      y2[i] = lo[i] + (hi[i] - lo[i]) * unit(rng);
    }
    double d2 = 0.0;
    for (size_t i = 0; i < m; i++) d2 += (y1[i] - y2[i]) * (y1[i] - y2[i]);
    if (d2 == 0.0) continue;
    try {
      rhs(tau, y1, f1);
      rhs(tau, y2, f2);
    } catch (const std::exception&) {
      continue;
    }
    double fd2 = 0.0;
    for (size_t i = 0; i < m; i++) fd2 += (f1[i] - f2[i]) * (f1[i] - f2[i]);
    c_est = std::max(c_est, std::sqrt(fd2 / d2));
  }
  if (c_est == 0.0) throw numeric_error("estimate_rhs_lipschitz: no usable samples");
  return c_est;
}

LipschitzReport flow_lipschitz_check(const RhsFn& rhs, double t0, double interval_len,
                                     const std::vector<std::pair<Vec, Vec>>& pairs, double c_est,
                                     const IntegratorConfig& cfg) {
  if (!(interval_len > 0.0)) throw domain_error("flow_lipschitz_check: interval_len must be > 0");
  if (interval_len >= 1.0 / c_est)
    throw domain_error("flow_lipschitz_check: interval_len must be below 1/C_est");
  LipschitzReport out;
  out.c_est = c_est;
  out.interval_len = interval_len;
  out.max_ratio = 1.0;  // identical pairs map to ratio 1
  const double t1 = t0 + interval_len;
  for (const auto& [y1, y2] : pairs) {
    double d0 = 0.0;
    for (size_t i = 0; i < y1.size(); i++) d0 += (y1[i] - y2[i]) * (y1[i] - y2[i]);
    if (d0 == 0.0) continue;
    DriveOutcome a = (t1 == 0.0) ? integrate_to_zero(rhs, t0, y1, cfg)
                                 : integrate_ode(rhs, t0, y1, t1, cfg);
    DriveOutcome b = (t1 == 0.0) ? integrate_to_zero(rhs, t0, y2, cfg)
                                 : integrate_ode(rhs, t0, y2, t1, cfg);
    if (a.termination == Termination::step_failure || b.termination == Termination::step_failure)
      throw numeric_error("flow_lipschitz_check: pair integration failed");
    double d1 = 0.0;
    for (size_t i = 0; i < a.y.size(); i++) d1 += (a.y[i] - b.y[i]) * (a.y[i] - b.y[i]);
    out.max_ratio = std::max(out.max_ratio, std::sqrt(d1 / d0));
  }
  out.bound_ok = out.max_ratio <= std::exp(1.0);
  return out;
}

LipschitzReport flow_lipschitz_check(const FermiChart& chart, double tau0, double interval_len,
                                     const std::vector<TauStatePair>& state_pairs,
                                     const IntegratorConfig& cfg) {
  if (state_pairs.empty()) throw domain_error("flow_lipschitz_check: no state pairs");
  const size_t m = pack(state_pairs.front().first).size();
  Vec lo(m, 1e300), hi(m, -1e300);
  std::vector<std::pair<Vec, Vec>> pairs;
  for (const auto& pr : state_pairs) {
    const Vec a = pack(pr.first), b = pack(pr.second);
    for (size_t i = 0; i < m; i++) {
      lo[i] = std::min({lo[i], a[i], b[i]});
      hi[i] = std::max({hi[i], a[i], b[i]});
    }
    pairs.push_back({a, b});
  }
  for (size_t i = 0; i < m; i++) {
    const double pad = 0.1 * (hi[i] - lo[i]) + 1e-6;
    lo[i] -= pad;
    hi[i] += pad;
  }
  RhsFn rhs = make_tau_rhs(chart);
  const double c_est =
      estimate_rhs_lipschitz(rhs, tau0, tau0 + interval_len, lo, hi, 1000, 20240u);
  return flow_lipschitz_check(rhs, tau0, interval_len, pairs, c_est, cfg);
}

namespace {

// Central-difference Jacobian of the right side in the state variables.
Mat rhs_state_jacobian(const RhsFn& rhs, double tau, const Vec& y) {
  const size_t m = y.size();
  Mat jac(static_cast<int>(m), static_cast<int>(m));
  Vec yp, ym, fp(m), fm(m);
  for (size_t j = 0; j < m; j++) {
    const double step = 1e-6 * (1.0 + std::abs(y[j]));
    yp = y;
    ym = y;
    yp[j] += step;
    ym[j] -= step;
    rhs(tau, yp, fp);
    rhs(tau, ym, fm);
    for (size_t i = 0; i < m; i++)
      jac(static_cast<int>(i), static_cast<int>(j)) = (fp[i] - fm[i]) / (2.0 * step);
  }
  return jac;
}

}  // namespace

FlowC1Report flow_c1_check_ode(const RhsFn& rhs, double t0, double t1, const Vec& y0,
                               const IntegratorConfig& cfg, std::vector<double> fd_steps,
                               bool endpoint_is_boundary) {
  const size_t m = y0.size();

  auto flow = [&](const Vec& start) {
    DriveOutcome r = endpoint_is_boundary ? integrate_to_zero(rhs, t0, start, cfg)
                                          : integrate_ode(rhs, t0, start, t1, cfg);
    if (r.termination == Termination::step_failure)
      throw numeric_error("flow_c1_check: flow integration failed");
    return r.y;
  };

  FlowC1Report out;
  out.fd_steps = fd_steps;
  for (double h : fd_steps) {
    Mat jac(static_cast<int>(m), static_cast<int>(m));
    for (size_t j = 0; j < m; j++) {
      Vec yp = y0, ym = y0;
      yp[j] += h;
      ym[j] -= h;
      const Vec fp = flow(yp);
      const Vec fm = flow(ym);
      for (size_t i = 0; i < m; i++)
        jac(static_cast<int>(i), static_cast<int>(j)) = (fp[i] - fm[i]) / (2.0 * h);
    }
    out.fd_jacobians.push_back(jac);
  }

  // augmented system z = (y, Y columns), Y' = D_yV(tau, y) Y
  RhsFn aug = [&rhs, m](double tau, const Vec& z, Vec& dz) {
    Vec y(z.begin(), z.begin() + m);
    Vec f(m);
    rhs(tau, y, f);
    const Mat jac = rhs_state_jacobian(rhs, tau, y);
    dz.assign(m * (m + 1), 0.0);
    for (size_t i = 0; i < m; i++) dz[i] = f[i];
    for (size_t col = 0; col < m; col++) {
      for (size_t i = 0; i < m; i++) {
        double s = 0.0;
        for (size_t k = 0; k < m; k++)
          s += jac(static_cast<int>(i), static_cast<int>(k)) * z[m + col * m + k];
        dz[m + col * m + i] = s;
      }
    }
  };
  Vec z0(m * (m + 1), 0.0);
  for (size_t i = 0; i < m; i++) z0[i] = y0[i];
  for (size_t col = 0; col < m; col++) z0[m + col * m + col] = 1.0;
  DriveOutcome r = endpoint_is_boundary ? integrate_to_zero(aug, t0, z0, cfg)
                                        : integrate_ode(aug, t0, z0, t1, cfg);
  if (r.termination == Termination::step_failure)
    throw numeric_error("flow_c1_check: variational integration failed");
  out.variational_jacobian = Mat(static_cast<int>(m), static_cast<int>(m));
  for (size_t col = 0; col < m; col++)
    for (size_t i = 0; i < m; i++)
      out.variational_jacobian(static_cast<int>(i), static_cast<int>(col)) = r.y[m + col * m + i];

  out.max_discrepancy = (out.fd_jacobians.back() - out.variational_jacobian).norm_inf();
  if (out.fd_jacobians.size() >= 3) {
    const double d1 = (out.fd_jacobians[0] - out.fd_jacobians[1]).norm_fro();
    const double d2 = (out.fd_jacobians[1] - out.fd_jacobians[2]).norm_fro();
    if (d2 > 0.0) out.observed_order = std::log2(d1 / d2);
  }
  return out;
}

FlowC1Report flow_c1_check(const FermiChart& chart, double tau0, double tau1,
                           const TauState& base_state, const IntegratorConfig& cfg,
                           std::vector<double> fd_steps) {
  if (!(tau0 < tau1) || tau1 > 0.0 || tau0 < -chart.delta())
    throw domain_error("flow_c1_check: need -delta <= tau0 < tau1 <= 0");
  return flow_c1_check_ode(make_tau_rhs(chart), tau0, tau1, pack(base_state), cfg, fd_steps,
                           tau1 == 0.0);
}

}  // namespace ccgeod
