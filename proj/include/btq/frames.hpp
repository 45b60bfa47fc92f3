// SPDX-License-Identifier: MIT
//
// Transport of the complex structure along the Hamiltonian flow and the
// determinant factors entering stationary-phase kernel asymptotics.
//
// Along the backward trajectory y(s) = phi_{-s}(x) with variational matrix
// B(s) = d phi_{-s}|_x, the pulled-back complex structure at x is
// J_s = B^{-1} J_0 B. The canonical frame W(s) solves
//     W' = P'_s W - P_s (1/2 G_s^{-1} G_s') W ,     W(0) = (1, -i),
// with P_s the (1,0) projector of J_s and G_s = Omega(x) J_s the associated
// bilinear metric. The relative determinant is the complex-bilinear ratio
//     D(s) = g_0(w_0, conj w_0) / g_s(W(s), Pbar_s conj w_0),
// Pbar_s = Id - (oblique projector onto T^{1,0}_0 along T^{0,1}_s).
// D is 1 for holomorphic isometry flows and its square root (branch tracked
// from 1) normalizes propagated coherent states and kernel diagonals.
//
// Single factor only; the product cases used elsewhere reduce to factors.

#pragma once

#include <Eigen/Dense>

#include "btq/geometry.hpp"
#include "btq/hamiltonian.hpp"

namespace btq {

struct FrameTransport {
  cplx d{1.0, 0.0};        // relative determinant D(t)
  cplx mu{1.0, 0.0};       // conj(sqrt(D(t))), branch tracked from +1
  Eigen::Matrix2d j_t;     // transported complex structure at the base point
  Eigen::Vector2cd w;      // canonical frame W(t)
  double residual = 0.0;   // |J_t W - i W|_inf  (eigenrelation diagnostic)
};

// Fixed-step RK4 on (y, B, W); throws numeric_error if the trajectory
// leaves the coordinate chart (|zeta| > 3).
FrameTransport canonical_frame_transport(const Hamiltonian& f, const Point& x,
                                         double t, int steps = 4096);

// <Pi_0^t xi_f(x), xi_f(x)> with the g_0-bilinear pairing; at t = 0 this is
// |xi|_g^2 / 2.
cplx oblique_xi_pairing(const Hamiltonian& f, const Point& x, double t,
                        int steps = 4096);

// Normalization of the windowed kernel diagonal at a running point:
// b^2 = 1 / (D(t) <Pi_0^t xi, xi>).
cplx kernel_b_squared(const Hamiltonian& f, const Point& x, double t,
                      int steps = 4096);

// Leading coefficient of the flow-aligned kernel along the graph of phi_t:
// a_0 = D(-t)^{-1/2} with the transported branch.
cplx kernel_a0_prediction(const Hamiltonian& f, const Point& x, double t,
                          int steps = 4096);

// Flat local model kernel exp(-pi [<Pi (Z-Z'), Z-Z'> + i omega(Z, Z')])
// for a compatible J (unit-density model; test helper).
cplx local_kernel_model(const Eigen::Matrix2d& j, const Eigen::Vector2d& z,
                        const Eigen::Vector2d& zp);

}  // namespace btq
