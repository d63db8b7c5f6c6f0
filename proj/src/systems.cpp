#include "ccgeod/systems.hpp"

#include <cmath>

#include "ccgeod/errors.hpp"

namespace ccgeod {

namespace {

// Contractions used below, all obtained from provider data through the
// identities for derivatives of an inverse matrix:
//   h_{mu b} h_{nu g} d_i h^{mu nu} = -d_i h_{bg}
//   h_{b g} d_i h^{ab}             = -[h^{-1} d_i h]^a_g
struct ChartLocal {
  int n;
  double rho, rho0;
  Vec rho_tan;
  Mat h, h_inv, dh0;
  std::vector<Mat> dh_tan;  // d_gamma h, gamma = 0..n-1
};

ChartLocal eval_chart(const FermiChart& chart, const Vec& x) {
  ChartLocal c;
  c.n = chart.boundary_dim();
  c.rho = chart.rho(x);
  c.rho0 = chart.drho_normal(x);
  c.rho_tan = chart.drho_tangential(x);
  c.h = chart.h(x);
  c.h_inv = inverse(c.h);
  c.dh0 = chart.dh_normal(x);
  c.dh_tan.reserve(c.n);
  for (int g = 1; g <= c.n; g++) c.dh_tan.push_back(chart.dh_tangential(x, g));
  return c;
}

}  // namespace

CotangentRhs rhs_cogeodesic(const FermiChart& chart, const CotangentState& s) {
  if (s.x[0] >= 0.0) throw domain_error("rhs_cogeodesic requires x^0 < 0");
  const ChartLocal c = eval_chart(chart, s.x);
  if (!(c.rho > 0.0))
    throw chart_integrity_error("rho <= 0 inside chart " + chart.id());
  const int n = c.n;
  const double rho2 = c.rho * c.rho;

  Vec xi_tan(s.xi.begin() + 1, s.xi.end());
  Vec v = c.h_inv * xi_tan;  // v^alpha = h^{ab} xi_b

  CotangentRhs out;
  out.dx.assign(n + 1, 0.0);
  out.dxi.assign(n + 1, 0.0);
  out.dx[0] = rho2 * s.xi[0];
  for (int a = 0; a < n; a++) out.dx[a + 1] = rho2 * v[a];

  // d_i h^{bg} xi_b xi_g = -v^T (d_i h) v
  out.dxi[0] = -c.rho0 / c.rho + 0.5 * rho2 * quad_form(v, c.dh0, v);
  for (int a = 0; a < n; a++)
    out.dxi[a + 1] = -c.rho_tan[a] / c.rho + 0.5 * rho2 * quad_form(v, c.dh_tan[a], v);
  return out;
}

TauRhs rhs_tau_regular(const FermiChart& chart, const TauState& s) {
  if (!(s.w0 > 0.0)) throw domain_error("rhs_tau_regular left the inbound regime (w0 <= 0)");
  const int n = chart.boundary_dim();
  const Vec x = s.coordinates();
  const double collar_slack = 1e-9 * chart.delta();
  if (x[0] > 0.0 || x[0] < -chart.delta() - collar_slack)
    throw domain_error("rhs_tau_regular requires tau in [-delta, 0]");
  if (x[0] < 0.0 && !(chart.rho(x) > 0.0))
    throw chart_integrity_error("rho <= 0 inside chart " + chart.id());

  const Vec remainder = smooth_remainder(chart, x);

  TauRhs out;
  out.dx_prime.assign(n, 0.0);
  out.dw.assign(n, 0.0);
  out.dw0 = 0.0;

  if (s.tau == 0.0) {
    // Continuous extension: every singular product vanishes.
    for (int a = 0; a < n; a++) out.dw[a] = remainder[a] / s.w0;
    return out;
  }

  const ChartLocal c = eval_chart(chart, x);
  const BoundaryData bd = boundary_data(chart, s.x_prime);
  const Vec& log_coeff = bd.log_coeff;
  const Mat& log_coeff_grad = bd.log_coeff_grad;

  const double log_tau = std::log(-s.tau);
  Vec a_shift(n);
  for (int a = 0; a < n; a++) a_shift[a] = log_coeff[a] * log_tau / s.w0;

  const Mat mu = transport_generator(chart, x);
  const Mat M = expm(mu);
  const Mat L = expm(mu.scaled(-1.0));

  Vec k(n);  // k_alpha = rho_alpha / rho
  for (int a = 0; a < n; a++) k[a] = c.rho_tan[a] / c.rho;

  Vec shifted = axpy(1.0, s.w, a_shift);  // w + A
  Vec v = L * shifted;                    // v^alpha = L(w + A)

  // V^alpha = rho v / w0
  for (int a = 0; a < n; a++) out.dx_prime[a] = c.rho * v[a] / s.w0;

  // W^0 = rho k_a v^a - rho rho_0 (v^T h v)/w0 + (1/2) rho^2 (v^T d0h v)/w0
  const double vhv = quad_form(v, c.h, v);
  const double vdh0v = quad_form(v, c.dh0, v);
  out.dw0 = c.rho * dot(k, v) - c.rho * c.rho0 * vhv / s.w0 +
            0.5 * c.rho * c.rho * vdh0v / s.w0;

  // W^alpha; see the ladder construction.  In contracted form:
  //   E/w0
  //   - rho [M q1]/w0,  q1^l = sum_e [h^{-1} d_e h]^l_d v^d v^e
  //   + (1/2) rho [M h^{-1} g]/w0,  g_s = v^T (d_s h) v
  //   + rho [sum_e (d_e M) v v^e]/w0
  //   - V^l d_l A - W^0 dA/dw0
  Vec q1(n, 0.0);
  for (int e = 0; e < n; e++) {
    const Mat ge = c.h_inv * c.dh_tan[e];
    const Vec gev = ge * v;
    for (int l = 0; l < n; l++) q1[l] += gev[l] * v[e];
  }
  Vec g_vec(n);
  for (int sdx = 0; sdx < n; sdx++) g_vec[sdx] = quad_form(v, c.dh_tan[sdx], v);

  const Vec m_q1 = M * q1;
  const Vec m_hinv_g = M * (c.h_inv * g_vec);

  Vec q2(n, 0.0);
  for (int e = 0; e < n; e++) {
    const Mat dM = transport_normal_matrix_gradient(chart, x, e + 1);
    const Vec dMv = dM * v;
    for (int a = 0; a < n; a++) q2[a] += dMv[a] * v[e];
  }

  for (int a = 0; a < n; a++) {
    double w_dot = remainder[a] / s.w0;
    w_dot += -c.rho * m_q1[a] / s.w0;
    w_dot += 0.5 * c.rho * m_hinv_g[a] / s.w0;
    w_dot += c.rho * q2[a] / s.w0;
    // - V^l d_l A^a with d_l A^a = (d_l c^a) log|tau| / w0
    for (int l = 0; l < n; l++)
      w_dot -= out.dx_prime[l] * log_coeff_grad(a, l) * log_tau / s.w0;
    // - W^0 dA^a/dw0 with dA/dw0 = -A/w0
    w_dot += out.dw0 * a_shift[a] / s.w0;
    out.dw[a] = w_dot;
  }
  return out;
}

TauState to_tau_state(const FermiChart& chart, const CotangentState& s) {
  if (s.x[0] >= 0.0) throw domain_error("to_tau_state requires x^0 < 0");
  const int n = chart.boundary_dim();
  const double r = chart.rho(s.x);
  const double zeta0 = r * s.xi[0];
  if (!(zeta0 > 0.0)) throw domain_error("to_tau_state: state not in the inbound regime");

  Vec xi_tan(s.xi.begin() + 1, s.xi.end());
  const Vec v = inverse(chart.h(s.x)) * xi_tan;
  const Mat M = expm(transport_generator(chart, s.x));
  const Vec v_hat = M * v;
  const Vec a_shift = log_shift(chart, s.x, zeta0);

  TauState out;
  out.tau = s.x[0];
  out.x_prime.assign(s.x.begin() + 1, s.x.end());
  out.w0 = zeta0;
  out.w.resize(n);
  for (int a = 0; a < n; a++) out.w[a] = v_hat[a] - a_shift[a];
  return out;
}

CotangentState from_tau_state(const FermiChart& chart, const TauState& s) {
  if (s.tau >= 0.0)
    throw domain_error("from_tau_state requires tau < 0 (xi_0 is undefined on the boundary)");
  if (!(s.w0 > 0.0)) throw domain_error("from_tau_state requires w0 > 0");
  const Vec x = s.coordinates();
  const int n = chart.boundary_dim();
  const double r = chart.rho(x);

  const Vec v = tangential_velocity(chart, s);
  const Mat h = chart.h(x);
  CotangentState out;
  out.t = 0.0;
  out.x = x;
  out.xi.assign(n + 1, 0.0);
  out.xi[0] = s.w0 / r;
  const Vec xi_tan = h * v;
  for (int a = 0; a < n; a++) out.xi[a + 1] = xi_tan[a];
  return out;
}

Vec tangential_velocity(const FermiChart& chart, const TauState& s) {
  const Vec x = s.coordinates();
  const Mat L = expm(transport_generator(chart, x).scaled(-1.0));
  const Vec a_shift = log_shift(chart, x, s.w0);
  return L * axpy(1.0, s.w, a_shift);
}

Vec pack(const TauState& s) {
  const int n = static_cast<int>(s.x_prime.size());
  Vec y(2 * n + 1);
  for (int a = 0; a < n; a++) y[a] = s.x_prime[a];
  y[n] = s.w0;
  for (int a = 0; a < n; a++) y[n + 1 + a] = s.w[a];
  return y;
}

TauState unpack_tau(double tau, const Vec& y, int n) {
  TauState s;
  s.tau = tau;
  s.x_prime.assign(y.begin(), y.begin() + n);
  s.w0 = y[n];
  s.w.assign(y.begin() + n + 1, y.begin() + 2 * n + 1);
  return s;
}

Vec pack(const CotangentState& s) {
  const int m = static_cast<int>(s.x.size());
  Vec y(2 * m);
  for (int i = 0; i < m; i++) y[i] = s.x[i];
  for (int i = 0; i < m; i++) y[m + i] = s.xi[i];
  return y;
}

CotangentState unpack_cotangent(double t, const Vec& y, int n) {
  CotangentState s;
  s.t = t;
  s.x.assign(y.begin(), y.begin() + n + 1);
  s.xi.assign(y.begin() + n + 1, y.begin() + 2 * (n + 1));
  return s;
}

}  // namespace ccgeod
