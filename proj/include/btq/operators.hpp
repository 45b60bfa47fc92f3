// SPDX-License-Identifier: MIT
//
// Quantization operators on H^0(E_p), E_p = O(p+m_1) x ... x O(p+m_s).
//
//   * Toeplitz:           T_p(f) = P M_f P
//   * covariant matrix:   M[nabla_xi] with nabla the Chern connection of E_p
//   * Kostant-Souriau:    Q_p(f) = T_p(f) + (i/2 pi p) M[nabla_xi]
//     plus, for the metaplectic model (all twists = -1), the curvature
//     correction (1/2p) T_p[ sum_i (1+|z_i|^2)^2 f_{z_i z̄_i} ] coming from
//     the K^{1/2} part of the lift. With it the height model has spectrum
//     exactly {(k+1/2)/p}; without it only {k/p + O(1/p^2)}.
//
// Assembly never touches a 2D grid: integrands separate per factor, the
// angular integral selects one Fourier mode analytically, and the radial
// integral is a Gauss-Legendre sum exact for the polynomial class at hand.
// Entries are built from tables E(k, node) = |v_k|(r_node) of metric-gauge
// monomial magnitudes, so nothing under- or overflows at large p.

#pragma once

#include <Eigen/Dense>

#include "btq/basis.hpp"
#include "btq/geometry.hpp"
#include "btq/hamiltonian.hpp"

namespace btq {

struct SpectralData {
  Eigen::VectorXd evals;  // ascending
  Eigen::MatrixXcd vecs;  // columns
};

SpectralData spectral_decompose(const Eigen::MatrixXcd& hermitian);

// V exp(sign 2 pi i t p Lambda) V^dagger. sign = -1 is the Schroedinger
// evolution U(t); sign = +1 is the flow-aligned propagator whose kernel
// concentrates on the graph of phi_t (see the trace/kernel checks).
Eigen::MatrixXcd evolution_operator(const SpectralData& sd, int p, double t, int sign);

double hermiticity_defect(const Eigen::MatrixXcd& m);  // ||M - M*||_max
double unitarity_defect(const Eigen::MatrixXcd& u);    // ||U*U - I||_max

class OperatorAssembler {
 public:
  // extra_degree widens the exactness budget when toeplitz_of() will be
  // called with observables of higher degree than f itself.
  OperatorAssembler(const ModelGeometry& geom, const Hamiltonian& f, int p,
                    int extra_degree = 0);

  const QuantumBasis& basis() const { return basis_; }
  const ModelGeometry& geometry() const { return geom_; }
  int p() const { return p_; }

  Eigen::MatrixXcd toeplitz() const;
  Eigen::MatrixXcd toeplitz_of(const Hamiltonian& g) const;
  Eigen::MatrixXcd covariant_xi() const;
  Eigen::MatrixXcd curvature_correction() const;
  Eigen::MatrixXcd kostant_souriau() const;

 private:
  ModelGeometry geom_;
  const Hamiltonian* f_;
  int p_;
  QuantumBasis basis_;
  std::vector<std::vector<double>> u_, wu_, r_;  // radial rule per factor
  std::vector<Eigen::MatrixXd> etab_;            // per factor, (N+1) x n_rad

  // <num/(1+r^2)^g * z^(k+pshift)-monomials> against z^j, one factor.
  Eigen::MatrixXcd factor_matrix(int fi, const Eigen::MatrixXcd& num, int g,
                                 int pshift) const;
  Eigen::MatrixXcd factor_toeplitz(int fi, const FactorPoly& fp) const;
  Eigen::MatrixXcd kron_all(const std::vector<Eigen::MatrixXcd>& m) const;
};

}  // namespace btq
