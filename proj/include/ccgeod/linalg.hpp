#pragma once

#include <cstddef>
#include <vector>

namespace ccgeod {

using Vec = std::vector<double>;

// Dense row-major matrix for the small (n <= ~8) systems that appear here.
class Mat {
public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0.0) {}

  static Mat identity(int n);
  static Mat zero(int rows, int cols) { return Mat(rows, cols); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  Mat operator*(const Mat& other) const;
  Vec operator*(const Vec& v) const;
  Mat operator+(const Mat& other) const;
  Mat operator-(const Mat& other) const;
  Mat scaled(double s) const;
  Mat transposed() const;

  // max row-sum norm
  double norm_inf() const;
  double norm_fro() const;

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
Vec axpy(double a, const Vec& x, const Vec& y);  // a*x + y

// v^T M w for square M
double quad_form(const Vec& v, const Mat& m, const Vec& w);

// Gaussian elimination with partial pivoting; throws numeric_error on singular input.
Mat inverse(const Mat& m);
Vec solve(const Mat& m, const Vec& rhs);

// Matrix exponential by scaling-and-squaring: squarings chosen so the scaled
// inf-norm is below 0.5, Taylor series summed until the term bound drops
// below 1e-16 (remainder < 1e-14).
Mat expm(const Mat& m);

// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
// Returns eigenvalues ascending; if vectors != nullptr the columns of
// *vectors are the matching eigenvectors.
Vec sym_eigenvalues(const Mat& m, Mat* vectors = nullptr);

struct LeastSquaresResult {
  Vec coeffs;
  double residual_rms = 0.0;
  // sigma_max/sigma_min of the design matrix after scaling columns to unit norm
  double condition = 0.0;
};

// Ordinary least squares on a dense design matrix (rows = observations).
// Solved through the eigendecomposition of the column-scaled Gram matrix.
LeastSquaresResult least_squares(const Mat& design, const Vec& rhs);

}  // namespace ccgeod
