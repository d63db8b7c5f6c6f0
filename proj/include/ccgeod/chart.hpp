#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ccgeod/linalg.hpp"

namespace ccgeod {

// Metric data in Fermi form near the boundary face {x^0 = 0}.
//
// Coordinates are (x^0, x^1, ..., x^n) with x^0 <= 0 in the manifold and
// x' = (x^1, ..., x^n) a boundary chart.  In this form h_{00} = 1 and
// h_{0beta} = 0, so a provider only supplies the tangential block h_{alpha
// beta}, the defining function rho, and their first partials.  The complete
// metric is g = rho^{-2} h.
//
// The collar depth delta < 1 bounds where the boundary-regular system is
// used (tau in [-delta, 0]).  Providers whose data stays valid deeper than
// the collar report that through x0_min() <= -delta, which is the domain
// used by the arclength flow.
// The boundary quantities entering the regularized system: kappa, its
// gradient, the log-shift coefficient kappa^a/kappa^2 and that
// coefficient's tangential gradient.
struct BoundaryData {
  double kappa = 0.0;
  Vec kappa_grad;
  Vec log_coeff;
  Mat log_coeff_grad;  // (component, derivative axis)
};

class FermiChart {
public:
  FermiChart();
  virtual ~FermiChart() = default;

  // process-unique instance tag; cache keys use it instead of the object
  // address, which the allocator may reuse
  uint64_t instance_tag() const { return instance_tag_; }

  // ambient dimension n+1 (boundary dimension n = dim-1)
  virtual int dim() const = 0;
  int boundary_dim() const { return dim() - 1; }

  // x is the full coordinate tuple (x^0, x'); matrices are the n x n
  // tangential block.
  virtual Mat h(const Vec& x) const = 0;
  virtual Mat dh_normal(const Vec& x) const = 0;              // d_0 h_{ab}
  virtual Mat dh_tangential(const Vec& x, int gamma) const = 0;  // d_gamma h_{ab}, gamma in 1..n

  virtual double rho(const Vec& x) const = 0;
  virtual double drho_normal(const Vec& x) const = 0;  // rho_0
  virtual Vec drho_tangential(const Vec& x) const = 0;  // (rho_1, ..., rho_n)

  virtual double delta() const = 0;                       // collar depth, in (0,1)
  virtual double x0_min() const { return -delta(); }      // deepest valid x^0
  virtual std::vector<std::pair<double, double>> x_box() const = 0;  // per-axis x' bounds

  virtual std::string id() const = 0;

  // Optional analytic boundary data.  Providers with closed-form kappa
  // derivatives should fill `out` and return true; the default falls back
  // to difference quotients along the boundary, whose roundoff floor
  // (~1e-12 relative on kappa_alpha) otherwise caps the accuracy of the
  // log-shift split.
  virtual bool boundary_data_analytic(const Vec& x_prime, BoundaryData& out) const {
    (void)x_prime;
    (void)out;
    return false;
  }

  // Step used for central differences of boundary functions along x'
  // (kappa_alpha and the tangential derivatives built from it).
  virtual double boundary_fd_step(int axis) const;

  bool contains(const Vec& x) const;           // x0_min <= x^0 <= 0, x' in box
  bool collar_contains(const Vec& x) const;    // -delta <= x^0 <= 0, x' in box
  void require_inside(const Vec& x) const;     // throws domain_error otherwise

private:
  uint64_t instance_tag_;
};

struct BoundaryPoint {
  Vec x_prime;
};

using ChartPtr = std::shared_ptr<const FermiChart>;

// kappa = |d rho|_h on the boundary; in Fermi form this is -rho_0(0, x').
double kappa(const FermiChart& chart, const Vec& x_prime);

// Gradient of kappa along the boundary, by central differences.
Vec kappa_gradient(const FermiChart& chart, const Vec& x_prime);

// k_alpha = rho_alpha / rho, which extends to kappa_alpha / kappa on the
// boundary.  The point is the full coordinate tuple; x^0 = 0 selects the
// boundary limit.
Vec k_covector(const FermiChart& chart, const Vec& x);

// kappa^alpha / kappa^2 at a boundary point, with kappa^alpha =
// h^{alpha beta}(0, x') kappa_beta.  This is the coefficient of the log
// shift and of the 1/x^0 model term split off the singular forcing; both
// consumers must share one definition so the split is exact.
Vec boundary_log_coefficient(const FermiChart& chart, const Vec& x_prime);

// Tangential derivatives of boundary_log_coefficient, central differences.
// Column gamma holds d_gamma of component alpha at (alpha, gamma).
Mat boundary_log_coefficient_gradient(const FermiChart& chart, const Vec& x_prime);

// All four boundary quantities at once, analytic when the provider offers
// them and assembled from difference quotients otherwise.
BoundaryData boundary_data(const FermiChart& chart, const Vec& x_prime);

// mu^alpha_gamma = -int_0^{x^0} h_{beta gamma} d_0 h^{alpha beta} dt at
// fixed x', by adaptive Simpson quadrature to 1e-12 relative tolerance.
// Results are cached per (x^0, x') in thread-local storage.  Evaluates the
// provider formulas directly; integrator stage points may sit marginally
// outside the box, so staying inside the domain is the caller's contract.
Mat transport_generator(const FermiChart& chart, const Vec& x);

struct TransportMatrices {
  Mat M;  // e^{mu}
  Mat L;  // e^{-mu}
};

TransportMatrices transport_matrices(const FermiChart& chart, const Vec& x);

// Tangential derivative d_gamma M by central differences over x'.
Mat transport_normal_matrix_gradient(const FermiChart& chart, const Vec& x, int gamma);

// The log shift A^alpha = (1/w0) (kappa^alpha/kappa^2) log|x^0|,
// defined for x^0 < 0 and w0 > 0.
Vec log_shift(const FermiChart& chart, const Vec& x, double w0);

// Smooth remainder E^alpha of -rho^{-2} M^alpha_lambda rho^lambda after the
// (kappa^alpha/kappa^2)/x^0 model term is split off.  Below |x^0| = eps_cut
// the direct difference loses precision to cancellation, so the value is
// quadratically extrapolated from x^0 in {-eps_cut, -2 eps_cut, -4 eps_cut}.
Vec smooth_remainder(const FermiChart& chart, const Vec& x, double eps_cut = 1e-4);

struct CotangentState;
struct TauState;

// Twice the Hamiltonian, rho^2 h^{ij} xi_i xi_j; equals 1 on unit-speed
// geodesics.
double energy(const FermiChart& chart, const CotangentState& state);
double energy(const FermiChart& chart, const TauState& state);

}  // namespace ccgeod
