// SPDX-License-Identifier: MIT
//
// Quantum parallel transport: the lifted Hamiltonian flow acting on
// holomorphic sections, compressed back to the holomorphic subspace.
//
// pullback_matrix(t) is the one-shot compression
//     (Phi_t s)(x) = c(y -> x) s(y),  y = phi_{-t}(x),
// where c is the prequantum transport coefficient along the flow line
// (energy rotation times line bundle holonomy, and for the metaplectic
// model also the half-form cocycle). For a holomorphic isometry flow this
// is exactly unitary; in general it is the Toeplitz-style compression.
//
// quantum_transport(t, steps) iterates the constant small-step matrix,
// S^steps with S = pullback_matrix(t/steps); as steps grows this converges
// to exp(+2 pi i t p Q_p(f)) at first order in 1/steps, which is the
// identity the transport checks probe.

#pragma once

#include <Eigen/Dense>

#include "btq/flow.hpp"
#include "btq/geometry.hpp"
#include "btq/hamiltonian.hpp"

namespace btq {

struct TransportOptions {
  int steps = 2000;        // quantum_transport subdivisions
  int extra_degree = 16;   // quadrature headroom beyond the bundle degree
  double oversample = 1.5;
  bool half_form = false;  // include the half-form cocycle (no chart switches)
  FlowOptions flow;        // tolerances for the per-node backward flow
};

struct TransportResult {
  Eigen::MatrixXcd op;          // matrix in the orthonormal section basis
  double gram_cond = 1.0;       // compression Gram condition (want ~1)
  double modulus_drift = 0.0;   // max | log|cocycle| | over nodes (want ~0)
};

TransportResult pullback_matrix(const Hamiltonian& f, const ModelGeometry& geom,
                                int p, double t, const TransportOptions& opt = {});

TransportResult quantum_transport(const Hamiltonian& f, const ModelGeometry& geom,
                                  int p, double t, const TransportOptions& opt = {});

// M^k by binary powering (k >= 0).
Eigen::MatrixXcd matrix_power(const Eigen::MatrixXcd& m, long k);

}  // namespace btq
