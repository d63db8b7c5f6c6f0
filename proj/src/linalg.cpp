#include "ccgeod/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "ccgeod/errors.hpp"

namespace ccgeod {

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; i++) m(i, i) = 1.0;
  return m;
}

Mat Mat::operator*(const Mat& other) const {
  Mat out(rows_, other.cols_);
  for (int i = 0; i < rows_; i++)
    for (int k = 0; k < cols_; k++) {
      const double aik = (*this)(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < other.cols_; j++) out(i, j) += aik * other(k, j);
    }
  return out;
}

Vec Mat::operator*(const Vec& v) const {
  Vec out(rows_, 0.0);
  for (int i = 0; i < rows_; i++) {
    double s = 0.0;
    for (int j = 0; j < cols_; j++) s += (*this)(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

Mat Mat::operator+(const Mat& other) const {
  Mat out = *this;
  for (int i = 0; i < rows_; i++)
    for (int j = 0; j < cols_; j++) out(i, j) += other(i, j);
  return out;
}

Mat Mat::operator-(const Mat& other) const {
  Mat out = *this;
  for (int i = 0; i < rows_; i++)
    for (int j = 0; j < cols_; j++) out(i, j) -= other(i, j);
  return out;
}

Mat Mat::scaled(double s) const {
  Mat out = *this;
  for (int i = 0; i < rows_; i++)
    for (int j = 0; j < cols_; j++) out(i, j) *= s;
  return out;
}

Mat Mat::transposed() const {
  Mat out(cols_, rows_);
  for (int i = 0; i < rows_; i++)
    for (int j = 0; j < cols_; j++) out(j, i) = (*this)(i, j);
  return out;
}

double Mat::norm_inf() const {
  double best = 0.0;
  for (int i = 0; i < rows_; i++) {
    double s = 0.0;
    for (int j = 0; j < cols_; j++) s += std::abs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

double Mat::norm_fro() const {
  double s = 0.0;
  for (int i = 0; i < rows_; i++)
    for (int j = 0; j < cols_; j++) s += (*this)(i, j) * (*this)(i, j);
  return std::sqrt(s);
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); i++) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

Vec axpy(double a, const Vec& x, const Vec& y) {
  Vec out(y);
  for (size_t i = 0; i < x.size(); i++) out[i] += a * x[i];
  return out;
}

double quad_form(const Vec& v, const Mat& m, const Vec& w) {
  double s = 0.0;
  for (int i = 0; i < m.rows(); i++) {
    double row = 0.0;
    for (int j = 0; j < m.cols(); j++) row += m(i, j) * w[j];
    s += v[i] * row;
  }
  return s;
}

namespace {

// LU factorization with partial pivoting, in place; perm holds row swaps.
void lu_factor(Mat& a, std::vector<int>& perm) {
  const int n = a.rows();
  perm.resize(n);
  for (int i = 0; i < n; i++) perm[i] = i;
  for (int col = 0; col < n; col++) {
    int piv = col;
    double best = std::abs(a(col, col));
    for (int r = col + 1; r < n; r++) {
      if (std::abs(a(r, col)) > best) {
        best = std::abs(a(r, col));
        piv = r;
      }
    }
    if (best == 0.0) throw numeric_error("singular matrix in LU factorization");
    if (piv != col) {
      for (int j = 0; j < n; j++) std::swap(a(col, j), a(piv, j));
      std::swap(perm[col], perm[piv]);
    }
    for (int r = col + 1; r < n; r++) {
      const double f = a(r, col) / a(col, col);
      a(r, col) = f;
      for (int j = col + 1; j < n; j++) a(r, j) -= f * a(col, j);
    }
  }
}

Vec lu_solve(const Mat& lu, const std::vector<int>& perm, const Vec& rhs) {
  const int n = lu.rows();
  Vec y(n);
  for (int i = 0; i < n; i++) y[i] = rhs[perm[i]];
  for (int i = 0; i < n; i++)
    for (int j = 0; j < i; j++) y[i] -= lu(i, j) * y[j];
  for (int i = n - 1; i >= 0; i--) {
    for (int j = i + 1; j < n; j++) y[i] -= lu(i, j) * y[j];
    y[i] /= lu(i, i);
  }
  return y;
}

}  // namespace

Mat inverse(const Mat& m) {
  const int n = m.rows();
  Mat lu = m;
  std::vector<int> perm;
  lu_factor(lu, perm);
  Mat out(n, n);
  Vec e(n, 0.0);
  for (int j = 0; j < n; j++) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    Vec col = lu_solve(lu, perm, e);
    for (int i = 0; i < n; i++) out(i, j) = col[i];
  }
  return out;
}

Vec solve(const Mat& m, const Vec& rhs) {
  Mat lu = m;
  std::vector<int> perm;
  lu_factor(lu, perm);
  return lu_solve(lu, perm, rhs);
}

Mat expm(const Mat& m) {
  const int n = m.rows();
  double nrm = m.norm_inf();
  int squarings = 0;
  while (nrm > 0.5 && squarings < 60) {
    nrm *= 0.5;
    squarings++;
  }
  Mat scaled = m.scaled(std::ldexp(1.0, -squarings));
  Mat result = Mat::identity(n);
  Mat term = Mat::identity(n);
  // ||scaled|| < 0.5, so term norms fall at least geometrically; 30 terms is
  // far past the 1e-16 cutoff in the worst case.
  for (int k = 1; k <= 30; k++) {
    term = (term * scaled).scaled(1.0 / k);
    result = result + term;
    if (term.norm_inf() < 1e-16) break;
  }
  for (int s = 0; s < squarings; s++) result = result * result;
  return result;
}

Vec sym_eigenvalues(const Mat& m, Mat* vectors) {
  const int n = m.rows();
  Mat a = m;
  Mat v = Mat::identity(n);
  for (int sweep = 0; sweep < 100; sweep++) {
    double off = 0.0;
    for (int p = 0; p < n; p++)
      for (int q = p + 1; q < n; q++) off += a(p, q) * a(p, q);
    if (off < 1e-300) break;
    for (int p = 0; p < n; p++) {
      for (int q = p + 1; q < n; q++) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; k++) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; k++) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; k++) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<int> order(n);
  for (int i = 0; i < n; i++) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });
  Vec evals(n);
  Mat sorted_v(n, n);
  for (int j = 0; j < n; j++) {
    evals[j] = a(order[j], order[j]);
    for (int i = 0; i < n; i++) sorted_v(i, j) = v(i, order[j]);
  }
  if (vectors) *vectors = sorted_v;
  return evals;
}

LeastSquaresResult least_squares(const Mat& design, const Vec& rhs) {
  const int m = design.rows();
  const int p = design.cols();
  if (m < p) throw fit_error("least_squares: fewer observations than coefficients");

  // Scale columns to unit norm so the Gram condition number measures
  // collinearity rather than raw column magnitudes.
  Vec scale(p, 1.0);
  for (int j = 0; j < p; j++) {
    double s = 0.0;
    for (int i = 0; i < m; i++) s += design(i, j) * design(i, j);
    s = std::sqrt(s);
    if (s == 0.0) throw fit_error("least_squares: zero design column");
    scale[j] = s;
  }

  Mat gram(p, p);
  Vec b(p, 0.0);
  for (int i = 0; i < m; i++) {
    for (int j = 0; j < p; j++) {
      const double dij = design(i, j) / scale[j];
      b[j] += dij * rhs[i];
      for (int k = j; k < p; k++) gram(j, k) += dij * design(i, k) / scale[k];
    }
  }
  for (int j = 0; j < p; j++)
    for (int k = 0; k < j; k++) gram(j, k) = gram(k, j);

  Mat evecs;
  Vec evals = sym_eigenvalues(gram, &evecs);
  const double lam_max = evals[p - 1];
  const double lam_min = evals[0];
  LeastSquaresResult out;
  out.condition = (lam_min > 0.0) ? std::sqrt(lam_max / lam_min)
                                  : std::numeric_limits<double>::infinity();

  // x = V diag(1/lambda) V^T b in scaled coordinates
  Vec scaled_coeffs(p, 0.0);
  for (int k = 0; k < p; k++) {
    if (evals[k] <= 0.0) throw fit_error("least_squares: rank-deficient design");
    double proj = 0.0;
    for (int j = 0; j < p; j++) proj += evecs(j, k) * b[j];
    proj /= evals[k];
    for (int j = 0; j < p; j++) scaled_coeffs[j] += evecs(j, k) * proj;
  }
  out.coeffs.resize(p);
  for (int j = 0; j < p; j++) out.coeffs[j] = scaled_coeffs[j] / scale[j];

  double ss = 0.0;
  for (int i = 0; i < m; i++) {
    double fit = 0.0;
    for (int j = 0; j < p; j++) fit += design(i, j) * out.coeffs[j];
    const double r = rhs[i] - fit;
    ss += r * r;
  }
  out.residual_rms = std::sqrt(ss / m);
  return out;
}

}  // namespace ccgeod
