#pragma once

#include <string>

#include "ccgeod/linalg.hpp"

namespace ccgeod {

// Arclength-parametrized phase point of the cogeodesic flow.
struct CotangentState {
  double t = 0.0;  // arclength parameter
  Vec x;           // (x^0, x^1, ..., x^n), x^0 <= 0
  Vec xi;          // (xi_0, xi_1, ..., xi_n)

  double zeta0(double rho) const { return rho * xi[0]; }
};

// Boundary-regular phase point of the tau-parametrized system.
struct TauState {
  double tau = 0.0;  // in [-delta, 0]
  Vec x_prime;       // boundary coordinates
  double w0 = 1.0;   // rho xi_0, positive in the inbound regime
  Vec w;             // regularized tangential velocities

  Vec coordinates() const {  // full (x^0, x') tuple
    Vec out(x_prime.size() + 1);
    out[0] = tau;
    for (size_t i = 0; i < x_prime.size(); i++) out[i + 1] = x_prime[i];
    return out;
  }
};

// Flat JSON array encodings with a kind tag:
//   {"kind":"cotangent","values":[t, x..., xi...]}
//   {"kind":"tau","values":[tau, x'..., w0, w...]}
std::string to_json(const CotangentState& s);
std::string to_json(const TauState& s);
CotangentState cotangent_state_from_json(const std::string& text);
TauState tau_state_from_json(const std::string& text);

}  // namespace ccgeod
