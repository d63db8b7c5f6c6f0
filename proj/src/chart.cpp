#include "ccgeod/chart.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <unordered_map>

#include "ccgeod/errors.hpp"
#include "ccgeod/states.hpp"

namespace ccgeod {

FermiChart::FermiChart() {
  static std::atomic<uint64_t> next_tag{1};
  instance_tag_ = next_tag.fetch_add(1, std::memory_order_relaxed);
}

double FermiChart::boundary_fd_step(int axis) const {
  const auto box = x_box();
  return 1e-5 * (box[axis].second - box[axis].first);
}

bool FermiChart::contains(const Vec& x) const {
  const double depth_slack = 1e-9 * std::abs(x0_min());
  if (x[0] > depth_slack || x[0] < x0_min() - depth_slack) return false;
  const auto box = x_box();
  for (int a = 0; a < boundary_dim(); a++) {
    const double slack = 1e-9 * (box[a].second - box[a].first);
    if (x[a + 1] < box[a].first - slack || x[a + 1] > box[a].second + slack) return false;
  }
  return true;
}

bool FermiChart::collar_contains(const Vec& x) const {
  return contains(x) && x[0] >= -delta();
}

void FermiChart::require_inside(const Vec& x) const {
  if (static_cast<int>(x.size()) != dim())
    throw domain_error("coordinate tuple has wrong dimension for chart " + id());
  if (!contains(x)) throw domain_error("point outside chart domain of " + id());
}

namespace {

Vec boundary_coords(const Vec& x_prime) {
  Vec x(x_prime.size() + 1, 0.0);
  for (size_t i = 0; i < x_prime.size(); i++) x[i + 1] = x_prime[i];
  return x;
}

// Difference stencil along a boundary axis: central in the interior,
// second-order one-sided within one step of a box edge.  Both variants keep
// the O(h^2) error; a merely shifted stencil would be O(h), which the
// remainder split amplifies by 1/eps_cut.
struct AxisStencil {
  int count = 0;
  double nodes[3];
  double weights[3];  // of the derivative, already divided by h
};

AxisStencil axis_stencil(const FermiChart& chart, int axis, double center) {
  const auto box = chart.x_box()[axis];
  const double h = chart.boundary_fd_step(axis);
  AxisStencil s;
  if (center + h > box.second) {
    s.count = 3;
    s.nodes[0] = center;
    s.nodes[1] = center - h;
    s.nodes[2] = center - 2.0 * h;
    s.weights[0] = 1.5 / h;
    s.weights[1] = -2.0 / h;
    s.weights[2] = 0.5 / h;
  } else if (center - h < box.first) {
    s.count = 3;
    s.nodes[0] = center;
    s.nodes[1] = center + h;
    s.nodes[2] = center + 2.0 * h;
    s.weights[0] = -1.5 / h;
    s.weights[1] = 2.0 / h;
    s.weights[2] = -0.5 / h;
  } else {
    s.count = 2;
    s.nodes[0] = center + h;
    s.nodes[1] = center - h;
    s.weights[0] = 0.5 / h;
    s.weights[1] = -0.5 / h;
  }
  return s;
}

}  // namespace

double kappa(const FermiChart& chart, const Vec& x_prime) {
  Vec x = boundary_coords(x_prime);
  chart.require_inside(x);
  const double k = -chart.drho_normal(x);
  if (!(k > 0.0))
    throw chart_integrity_error("kappa <= 0 at a boundary point of " + chart.id());
  return k;
}

namespace {

double kappa_raw(const FermiChart& chart, const Vec& x_prime) {
  const double k = -chart.drho_normal(boundary_coords(x_prime));
  if (!(k > 0.0))
    throw chart_integrity_error("kappa <= 0 at a boundary point of " + chart.id());
  return k;
}

Vec clamp_to_box(const FermiChart& chart, Vec x_prime) {
  const auto box = chart.x_box();
  for (size_t a = 0; a < x_prime.size(); a++)
    x_prime[a] = std::clamp(x_prime[a], box[a].first, box[a].second);
  return x_prime;
}

Vec kappa_gradient_fd(const FermiChart& chart, const Vec& x_prime_in) {
  const Vec x_prime = clamp_to_box(chart, x_prime_in);
  const int n = chart.boundary_dim();
  Vec grad(n, 0.0);
  for (int a = 0; a < n; a++) {
    const AxisStencil st = axis_stencil(chart, a, x_prime[a]);
    double d = 0.0;
    for (int k = 0; k < st.count; k++) {
      Vec q = x_prime;
      q[a] = st.nodes[k];
      d += st.weights[k] * kappa_raw(chart, q);
    }
    grad[a] = d;
  }
  return grad;
}

Vec log_coeff_at(const FermiChart& chart, const Vec& x_prime) {
  BoundaryData bd;
  if (chart.boundary_data_analytic(x_prime, bd)) return bd.log_coeff;
  const double k = kappa_raw(chart, clamp_to_box(chart, x_prime));
  Vec grad = kappa_gradient_fd(chart, x_prime);
  Vec x(x_prime.size() + 1, 0.0);
  for (size_t i = 0; i < x_prime.size(); i++) x[i + 1] = x_prime[i];
  Vec up = inverse(chart.h(x)) * grad;
  for (auto& c : up) c /= k * k;
  return up;
}

}  // namespace

BoundaryData boundary_data(const FermiChart& chart, const Vec& x_prime_in) {
  BoundaryData out;
  if (chart.boundary_data_analytic(x_prime_in, out)) return out;
  const Vec x_prime = clamp_to_box(chart, x_prime_in);
  const int n = chart.boundary_dim();
  out.kappa = kappa_raw(chart, x_prime);
  out.kappa_grad = kappa_gradient_fd(chart, x_prime);
  out.log_coeff = log_coeff_at(chart, x_prime);
  out.log_coeff_grad = Mat(n, n);
  for (int g = 0; g < n; g++) {
    const AxisStencil st = axis_stencil(chart, g, x_prime[g]);
    for (int k = 0; k < st.count; k++) {
      Vec q = x_prime;
      q[g] = st.nodes[k];
      const Vec c = log_coeff_at(chart, q);
      for (int a = 0; a < n; a++) out.log_coeff_grad(a, g) += st.weights[k] * c[a];
    }
  }
  return out;
}

Vec kappa_gradient(const FermiChart& chart, const Vec& x_prime) {
  BoundaryData bd;
  if (chart.boundary_data_analytic(x_prime, bd)) return bd.kappa_grad;
  return kappa_gradient_fd(chart, x_prime);
}

Vec k_covector(const FermiChart& chart, const Vec& x) {
  chart.require_inside(x);
  const int n = chart.boundary_dim();
  if (x[0] == 0.0) {
    Vec x_prime(x.begin() + 1, x.end());
    const double k = kappa(chart, x_prime);
    Vec grad = kappa_gradient(chart, x_prime);
    for (int a = 0; a < n; a++) grad[a] /= k;
    return grad;
  }
  const double r = chart.rho(x);
  if (!(r > 0.0))
    throw chart_integrity_error("rho <= 0 at an interior point of " + chart.id());
  Vec out = chart.drho_tangential(x);
  for (int a = 0; a < n; a++) out[a] /= r;
  return out;
}

Vec boundary_log_coefficient(const FermiChart& chart, const Vec& x_prime) {
  return log_coeff_at(chart, x_prime);
}

Mat boundary_log_coefficient_gradient(const FermiChart& chart, const Vec& x_prime) {
  return boundary_data(chart, x_prime).log_coeff_grad;
}

namespace {

// integrand of mu: [h^{-1} d_0 h]^alpha_gamma, equal to -h_{beta gamma} d_0 h^{alpha beta}
Mat mu_integrand(const FermiChart& chart, double x0, const Vec& x_prime) {
  Vec x = boundary_coords(x_prime);
  x[0] = x0;
  return inverse(chart.h(x)) * chart.dh_normal(x);
}

struct SimpsonPanel {
  double a, b;
  Mat fa, fm, fb;
  Mat estimate;
};

Mat simpson_estimate(const Mat& fa, const Mat& fm, const Mat& fb, double a, double b) {
  return (fa + fm.scaled(4.0) + fb).scaled((b - a) / 6.0);
}

Mat adaptive_simpson(const FermiChart& chart, const Vec& x_prime, double a, double b,
                     const Mat& fa, const Mat& fm, const Mat& fb, const Mat& whole,
                     double tol, int depth) {
  if (depth > 40)
    throw numeric_error("transport_generator quadrature failed to converge on " + chart.id());
  const double m = 0.5 * (a + b);
  const Mat fml = mu_integrand(chart, 0.5 * (a + m), x_prime);
  const Mat fmr = mu_integrand(chart, 0.5 * (m + b), x_prime);
  const Mat left = simpson_estimate(fa, fml, fm, a, m);
  const Mat right = simpson_estimate(fm, fmr, fb, m, b);
  const Mat refined = left + right;
  if ((refined - whole).norm_inf() <= 15.0 * tol) {
    // standard Richardson correction for Simpson
    return refined + (refined - whole).scaled(1.0 / 15.0);
  }
  return adaptive_simpson(chart, x_prime, a, m, fa, fml, fm, left, 0.5 * tol, depth + 1) +
         adaptive_simpson(chart, x_prime, m, b, fm, fmr, fb, right, 0.5 * tol, depth + 1);
}

Mat compute_mu(const FermiChart& chart, double x0, const Vec& x_prime) {
  const int n = chart.boundary_dim();
  if (x0 == 0.0) return Mat::zero(n, n);
  // mu = -int_0^{x0} (-h^{-1} d0 h) = int_0^{x0} h^{-1} d0 h
  const double a = 0.0, b = x0;
  const Mat fa = mu_integrand(chart, a, x_prime);
  const Mat fm = mu_integrand(chart, 0.5 * (a + b), x_prime);
  const Mat fb = mu_integrand(chart, b, x_prime);
  const Mat whole = simpson_estimate(fa, fm, fb, a, b);
  const double scale = std::max(whole.norm_inf(), std::max(fa.norm_inf(), fb.norm_inf()) * std::abs(b));
  const double tol = 1e-12 * std::max(scale, 1e-30);
  return adaptive_simpson(chart, x_prime, a, b, fa, fm, fb, whole, tol, 0);
}

struct MuKey {
  uint64_t chart;
  double x0;
  Vec x_prime;
  bool operator==(const MuKey& other) const {
    return chart == other.chart && x0 == other.x0 && x_prime == other.x_prime;
  }
};

struct MuKeyHash {
  size_t operator()(const MuKey& k) const {
    size_t h = std::hash<uint64_t>()(k.chart);
    auto mix = [&h](double v) {
      uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      h ^= std::hash<uint64_t>()(bits) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    };
    mix(k.x0);
    for (double v : k.x_prime) mix(v);
    return h;
  }
};

}  // namespace

Mat transport_generator(const FermiChart& chart, const Vec& x) {
  const Vec x_prime(x.begin() + 1, x.end());
  // Per-thread cache: the integrators revisit the same (x^0, x') pairs when
  // forming stage values and finite differences.
  thread_local std::unordered_map<MuKey, Mat, MuKeyHash> cache;
  MuKey key{chart.instance_tag(), x[0], x_prime};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Mat mu = compute_mu(chart, x[0], x_prime);
  if (cache.size() > 200000) cache.clear();
  cache.emplace(std::move(key), mu);
  return mu;
}

TransportMatrices transport_matrices(const FermiChart& chart, const Vec& x) {
  const Mat mu = transport_generator(chart, x);
  return TransportMatrices{expm(mu), expm(mu.scaled(-1.0))};
}

Mat transport_normal_matrix_gradient(const FermiChart& chart, const Vec& x, int gamma) {
  const int n = chart.boundary_dim();
  const AxisStencil st = axis_stencil(chart, gamma - 1, x[gamma]);
  Mat out(n, n);
  for (int k = 0; k < st.count; k++) {
    Vec q = x;
    q[gamma] = st.nodes[k];
    out = out + expm(transport_generator(chart, q)).scaled(st.weights[k]);
  }
  return out;
}

Vec log_shift(const FermiChart& chart, const Vec& x, double w0) {
  if (x[0] >= 0.0) throw domain_error("log_shift requires x^0 < 0");
  if (!(w0 > 0.0)) throw domain_error("log_shift requires w0 > 0");
  const Vec x_prime(x.begin() + 1, x.end());
  Vec c = boundary_log_coefficient(chart, x_prime);
  const double f = std::log(std::abs(x[0])) / w0;
  for (auto& v : c) v *= f;
  return c;
}

namespace {

// Direct formula, valid away from x^0 = 0:
// E = -rho^{-2} M^a_l rho^l - (kappa^a/kappa^2)/x^0
Vec smooth_remainder_direct(const FermiChart& chart, const Vec& x, const Vec& log_coeff) {
  const int n = chart.boundary_dim();
  const double r = chart.rho(x);
  if (!(r > 0.0))
    throw chart_integrity_error("rho <= 0 at an interior point of " + chart.id());
  const Mat h_inv = inverse(chart.h(x));
  const Vec rho_tan = chart.drho_tangential(x);
  const Vec rho_up = h_inv * rho_tan;
  const Mat M = expm(transport_generator(chart, x));
  const Vec m_rho = M * rho_up;
  Vec out(n);
  for (int a = 0; a < n; a++) out[a] = -m_rho[a] / (r * r) - log_coeff[a] / x[0];
  return out;
}

}  // namespace

Vec smooth_remainder(const FermiChart& chart, const Vec& x, double eps_cut) {
  const int n = chart.boundary_dim();
  const Vec x_prime(x.begin() + 1, x.end());
  const Vec log_coeff = boundary_log_coefficient(chart, x_prime);
  if (std::abs(x[0]) >= eps_cut) return smooth_remainder_direct(chart, x, log_coeff);

  // Quadratic extrapolation from three stations clear of the cancellation
  // region, evaluated at this x^0.
  const double s0 = -eps_cut, s1 = -2.0 * eps_cut, s2 = -4.0 * eps_cut;
  Vec xs = x;
  xs[0] = s0;
  const Vec e0 = smooth_remainder_direct(chart, xs, log_coeff);
  xs[0] = s1;
  const Vec e1 = smooth_remainder_direct(chart, xs, log_coeff);
  xs[0] = s2;
  const Vec e2 = smooth_remainder_direct(chart, xs, log_coeff);
  const double t = x[0];
  const double l0 = (t - s1) * (t - s2) / ((s0 - s1) * (s0 - s2));
  const double l1 = (t - s0) * (t - s2) / ((s1 - s0) * (s1 - s2));
  const double l2 = (t - s0) * (t - s1) / ((s2 - s0) * (s2 - s1));
  Vec out(n);
  for (int a = 0; a < n; a++) out[a] = l0 * e0[a] + l1 * e1[a] + l2 * e2[a];
  return out;
}

double energy(const FermiChart& chart, const CotangentState& state) {
  const int n = chart.boundary_dim();
  const double r = chart.rho(state.x);
  const Mat h_inv = inverse(chart.h(state.x));
  Vec xi_tan(state.xi.begin() + 1, state.xi.end());
  double s = state.xi[0] * state.xi[0];
  for (int a = 0; a < n; a++)
    for (int b = 0; b < n; b++) s += h_inv(a, b) * xi_tan[a] * xi_tan[b];
  return r * r * s;
}

double energy(const FermiChart& chart, const TauState& state) {
  if (state.tau == 0.0) return state.w0 * state.w0;
  const Vec x = state.coordinates();
  const double r = chart.rho(x);
  const Mat h = chart.h(x);
  const Mat L = expm(transport_generator(chart, x).scaled(-1.0));
  const Vec a_shift = log_shift(chart, x, state.w0);
  Vec v = L * axpy(1.0, state.w, a_shift);
  return state.w0 * state.w0 + r * r * quad_form(v, h, v);
}

}  // namespace ccgeod
