#pragma once

#include <string>
#include <vector>

#include "ccgeod/chart.hpp"

namespace ccgeod {

// Upper-half-plane family g = (dx^2 + dy^2) / (y e^{eps x})^2 in the Fermi
// chart x^0 = -y, x^1 = x: h is Euclidean and rho = -x^0 e^{eps x^1}.
// eps = 0 is the hyperbolic plane.
struct EpsilonFamily {
  double epsilon = 0.0;
  double delta = 0.9;
  std::pair<double, double> x_box{-2.0, 2.0};
  // The metric data is entire, so the arclength flow may run deeper than the
  // collar; geodesics in the figures start at y = 1.
  double depth = 4.0;
};

ChartPtr make_epsilon_chart(const EpsilonFamily& params);

// Test fixture with a nontrivial transport (mu != 0) but constant kappa:
// h = (dx^0)^2 + (1 + x^0)^2 (dx^1)^2, rho = -x^0 on x^0 in [-0.9, 0].
ChartPtr make_warped_ah_chart();

// Truncated multivariate polynomial data (degree <= 6) for h_{ab} and rho,
// with derivatives formed symbolically from the coefficients.
struct PolynomialTerm {
  double coeff = 0.0;
  std::vector<int> powers;  // one exponent per coordinate (x^0, x')
};

using Polynomial = std::vector<PolynomialTerm>;

struct PolynomialChartSpec {
  int dim = 2;
  double delta = 0.9;
  std::vector<std::pair<double, double>> x_box;
  std::vector<std::vector<Polynomial>> h;  // n x n, symmetric
  Polynomial rho;
};

ChartPtr make_polynomial_chart(const PolynomialChartSpec& spec);

// Chart documents:
//   {"type": "epsilon_family", "epsilon": 1.0, "delta": 0.9, "x_box": [-2, 2]}
//   {"type": "warped_ah"}
//   {"type": "polynomial", "dim": 2, "delta": 0.9, "x_box": [[-1, 1]],
//    "h": [[[{"c": 1.0, "p": [0, 0]}]]], "rho": [{"c": -1.0, "p": [1, 0]}]}
// Also accepts the shorthand "epsilon:<value>".
ChartPtr load_chart(const std::string& spec_text);
ChartPtr load_chart_file(const std::string& path);

// Boundary abscissa x0 + y0 tan(theta/2) of the hyperbolic semicircle
// through (x0, y0) with unit tangent (sin theta, -cos theta); theta is
// measured from the downward vertical.
double hyperbolic_endpoint_oracle(double x0, double y0, double theta);

}  // namespace ccgeod
