#pragma once

#include "ccgeod/chart.hpp"
#include "ccgeod/states.hpp"

namespace ccgeod {

// d/dt of (x, xi) for the cogeodesic flow restricted to the unit energy
// surface:
//   x^i'  =  rho^2 h^{ij} xi_j
//   xi_i' = -rho^{-1} rho_i - (1/2) rho^2 d_i h^{jk} xi_j xi_k
struct CotangentRhs {
  Vec dx;   // n+1
  Vec dxi;  // n+1
};

CotangentRhs rhs_cogeodesic(const FermiChart& chart, const CotangentState& s);

// d/dtau of (x', w0, w) for the boundary-regular system.  All products of
// the forms tau log|tau|, tau log^2|tau|, tau log^3|tau| extend continuously
// by zero at tau = 0, where the right side reduces to (0, 0, E/w0).
struct TauRhs {
  Vec dx_prime;  // V^alpha
  double dw0;    // W^0
  Vec dw;        // W^alpha
};

TauRhs rhs_tau_regular(const FermiChart& chart, const TauState& s);

// Variable ladder xi -> (w0, v) -> M v -> w = M v - A, with tau = x^0.
TauState to_tau_state(const FermiChart& chart, const CotangentState& s);

// Inverse ladder; the arclength parameter is not recoverable and is set to 0.
CotangentState from_tau_state(const FermiChart& chart, const TauState& s);

// Tangential velocities v^alpha = L^alpha_beta (w^beta + A^beta) of a
// tau-state (the quantity rho^{-2} dx^alpha/dt).
Vec tangential_velocity(const FermiChart& chart, const TauState& s);

// Flat packing used by the integrators: [x'..., w0, w...] (size 2n+1).
Vec pack(const TauState& s);
TauState unpack_tau(double tau, const Vec& y, int n);

Vec pack(const CotangentState& s);
CotangentState unpack_cotangent(double t, const Vec& y, int n);

}  // namespace ccgeod
