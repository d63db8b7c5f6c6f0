#include "ccgeod/shoot.hpp"

#include <cmath>

#include "ccgeod/errors.hpp"
#include "ccgeod/systems.hpp"

namespace ccgeod {

namespace {

// g-unit normalization: |v|_g = |v|_h / rho.
Vec normalize_direction(const FermiChart& chart, const Vec& p, const Vec& v) {
  const int n = chart.boundary_dim();
  const Mat h = chart.h(p);
  double h_norm2 = v[0] * v[0];
  for (int a = 0; a < n; a++)
    for (int b = 0; b < n; b++) h_norm2 += h(a, b) * v[a + 1] * v[b + 1];
  if (!(h_norm2 > 0.0)) throw domain_error("endpoint_map: zero direction");
  const double r = chart.rho(p);
  const double g_norm = std::sqrt(h_norm2) / r;
  Vec out(v);
  for (auto& c : out) c /= g_norm;
  return out;
}

CotangentState momentum_state(const FermiChart& chart, const Vec& p, const Vec& v_unit) {
  // xi_i = g_{ij} v^j = rho^{-2} h_{ij} v^j for a g-unit velocity
  const int n = chart.boundary_dim();
  const double r = chart.rho(p);
  const Mat h = chart.h(p);
  CotangentState s;
  s.t = 0.0;
  s.x = p;
  s.xi.assign(n + 1, 0.0);
  s.xi[0] = v_unit[0] / (r * r);
  for (int a = 0; a < n; a++) {
    double m = 0.0;
    for (int b = 0; b < n; b++) m += h(a, b) * v_unit[b + 1];
    s.xi[a + 1] = m / (r * r);
  }
  return s;
}

double estimate_t_max(const FermiChart& chart, const Vec& p, double x_stop) {
  // crude decay-rate bound: kappa >= kappa_lo on the boundary box implies
  // x(t) <= x(0) e^{-c t} eventually; pad generously and let max_steps be
  // the real backstop.
  const auto box = chart.x_box();
  const int n = chart.boundary_dim();
  double kappa_lo = 1e300;
  const int grid = 5;
  Vec q(n, 0.0);
  std::vector<int> idx(n, 0);
  while (true) {
    for (int a = 0; a < n; a++)
      q[a] = box[a].first + (box[a].second - box[a].first) * idx[a] / double(grid - 1);
    kappa_lo = std::min(kappa_lo, kappa(chart, q));
    int a = 0;
    for (; a < n; a++) {
      if (++idx[a] < grid) break;
      idx[a] = 0;
    }
    if (a == n) break;
  }
  const double span = std::log(std::abs(p[0]) / x_stop);
  return 20.0 * (1.0 + std::abs(span)) / std::max(kappa_lo, 1e-6);
}

}  // namespace

ShootResult endpoint_map(const FermiChart& chart, const Vec& p, const Vec& v,
                         const IntegratorConfig& cfg) {
  chart.require_inside(p);
  if (!(p[0] < 0.0)) throw domain_error("endpoint_map: p must be an interior point");
  if (!(v[0] > 0.0))
    throw domain_error("endpoint_map: direction must have positive x^0 component");

  ShootResult out;
  const double x_stop = cfg.x_stop_fraction * chart.delta();
  const Vec v_unit = normalize_direction(chart, p, v);
  const CotangentState s0 = momentum_state(chart, p, v_unit);

  TauState handoff;
  if (p[0] >= -x_stop) {
    // already inside the handoff collar
    handoff = to_tau_state(chart, s0);
    out.arclength_trajectory.parameter_kind = ParamKind::arclength;
    out.arclength_trajectory.chart_id = chart.id();
    out.arclength_trajectory.boundary_dim = chart.boundary_dim();
    out.arclength_trajectory.params.push_back(s0.t);
    out.arclength_trajectory.states.push_back(pack(s0));
    out.arclength_trajectory.termination = Termination::reached_boundary;
  } else {
    const double t_max = estimate_t_max(chart, p, x_stop);
    out.arclength_trajectory = integrate_t(chart, s0, t_max, cfg);
    if (out.arclength_trajectory.termination != Termination::reached_boundary) {
      out.termination = out.arclength_trajectory.termination;
      return out;
    }
    const CotangentState hs =
        out.arclength_trajectory.cotangent_state(out.arclength_trajectory.size() - 1);
    handoff = to_tau_state(chart, hs);
  }
  out.handoff = handoff;
  out.diagnostics["zeta0_at_handoff"] = handoff.w0;
  out.diagnostics["handoff_tau"] = handoff.tau;

  out.trajectory = integrate_tau_to_boundary(chart, handoff, cfg);
  out.termination = out.trajectory.termination;
  if (!out.ok()) return out;

  const TauState end = out.trajectory.tau_state(out.trajectory.size() - 1);
  out.endpoint.x_prime = end.x_prime;
  out.diagnostics["final_energy_drift"] = std::abs(energy(chart, end) - 1.0);

  // decay-rate diagnostic over the tail of the arclength phase
  const Trajectory& at = out.arclength_trajectory;
  if (at.size() >= 12) {
    const double t0 = at.front_param(), t1 = at.back_param();
    const double lo = t0 + 0.7 * (t1 - t0);
    try {
      out.diagnostics["rho_decay_slope"] = rho_decay_rate(chart, at, lo, t1);
    } catch (const fit_error&) {
      // window too sparse; leave the diagnostic out
    }
  }
  return out;
}

EndpointJacobian endpoint_jacobian(const FermiChart& chart, const Vec& p, const Vec& v,
                                   const IntegratorConfig& cfg, double fd_step) {
  chart.require_inside(p);
  const int n = chart.boundary_dim();
  const Mat h = chart.h(p);
  const int m = n + 1;

  // h-orthonormal base direction and a basis of its orthogonal complement,
  // by Gram-Schmidt over the coordinate frame.  h-orthogonality agrees with
  // g-orthogonality, so cos(s) v + sin(s) u stays h-unit.
  auto h_inner = [&](const Vec& a, const Vec& b) {
    double s = a[0] * b[0];
    for (int i = 0; i < n; i++)
      for (int j = 0; j < n; j++) s += h(i, j) * a[i + 1] * b[j + 1];
    return s;
  };
  Vec base(v);
  {
    const double nv = std::sqrt(h_inner(base, base));
    for (auto& c : base) c /= nv;
  }
  std::vector<Vec> basis;
  for (int axis = 0; axis < m && static_cast<int>(basis.size()) < n; axis++) {
    Vec u(m, 0.0);
    u[m - 1 - axis] = 1.0;  // start from the tangential directions
    double c = h_inner(u, base);
    for (int i = 0; i < m; i++) u[i] -= c * base[i];
    for (const auto& prev : basis) {
      const double d = h_inner(u, prev);
      for (int i = 0; i < m; i++) u[i] -= d * prev[i];
    }
    const double nu = std::sqrt(std::max(h_inner(u, u), 0.0));
    if (nu < 1e-10) continue;
    for (auto& ci : u) ci /= nu;
    basis.push_back(u);
  }
  if (static_cast<int>(basis.size()) != n)
    throw numeric_error("endpoint_jacobian: could not build a basis of v-perp");

  auto shoot_dir = [&](const Vec& dir) {
    ShootResult r = endpoint_map(chart, p, dir, cfg);
    if (!r.ok())
      throw numeric_error("endpoint_jacobian: shot failed with termination " +
                          to_string(r.termination));
    return r.endpoint.x_prime;
  };

  EndpointJacobian out;
  out.fd_step = fd_step;
  out.jacobian = Mat(n, n);
  for (int k = 0; k < n; k++) {
    Vec dp(m), dm(m);
    for (int i = 0; i < m; i++) {
      dp[i] = std::cos(fd_step) * base[i] + std::sin(fd_step) * basis[k][i];
      dm[i] = std::cos(fd_step) * base[i] - std::sin(fd_step) * basis[k][i];
    }
    const Vec ep = shoot_dir(dp);
    const Vec em = shoot_dir(dm);
    for (int a = 0; a < n; a++) out.jacobian(a, k) = (ep[a] - em[a]) / (2.0 * fd_step);
  }

  const Mat jtj = out.jacobian.transposed() * out.jacobian;
  const Vec evals = sym_eigenvalues(jtj);
  out.smallest_singular_value = std::sqrt(std::max(evals[0], 0.0));
  return out;
}

Trajectory boundary_shoot(const FermiChart& chart, const BoundaryPoint& q, const Vec& u,
                          double tau_end, const IntegratorConfig& cfg) {
  const int n = chart.boundary_dim();
  const double kap = kappa(chart, q.x_prime);
  const Vec grad = kappa_gradient(chart, q.x_prime);
  Vec x0(q.x_prime.size() + 1, 0.0);
  for (size_t i = 0; i < q.x_prime.size(); i++) x0[i + 1] = q.x_prime[i];
  const Mat h0_inv = inverse(chart.h(x0));
  const Vec kappa_up = h0_inv * grad;

  Vec w_init(n);
  for (int a = 0; a < n; a++) w_init[a] = kappa_up[a] / (2.0 * kap * kap) - 2.0 * u[a] / kap;
  return integrate_tau_from_boundary(chart, q, w_init, tau_end, cfg);
}

double rho_decay_rate(const FermiChart& chart, const Trajectory& traj, double t_lo,
                      double t_hi) {
  if (traj.parameter_kind != ParamKind::arclength)
    throw domain_error("rho_decay_rate needs an arclength trajectory");
  std::vector<double> ts, logs;
  for (size_t i = 0; i < traj.size(); i++) {
    const double t = traj.params[i];
    if (t < t_lo || t > t_hi) continue;
    const CotangentState s = traj.cotangent_state(i);
    ts.push_back(t);
    logs.push_back(std::log(chart.rho(s.x)));
  }
  if (ts.size() < 10)
    throw fit_error("rho_decay_rate: window holds fewer than 10 samples");
  Mat design(static_cast<int>(ts.size()), 2);
  Vec rhs(ts.size());
  for (size_t i = 0; i < ts.size(); i++) {
    design(static_cast<int>(i), 0) = 1.0;
    design(static_cast<int>(i), 1) = ts[i];
    rhs[i] = logs[i];
  }
  return least_squares(design, rhs).coeffs[1];
}

}  // namespace ccgeod
