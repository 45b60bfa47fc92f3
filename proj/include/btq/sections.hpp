// SPDX-License-Identifier: MIT
//
// Sections sampled on quadrature grids, all in the metric gauge of
// basis.hpp: a sample array s(node) represents the pointwise pairing of the
// section with the unit-length frame, so |s(node)| is the invariant norm
// and inner products are plain weighted sums.

#pragma once

#include <Eigen/Dense>

#include "btq/basis.hpp"
#include "btq/grid.hpp"

namespace btq {

// B(node, k) = v_k(x_node); nodes flattened in grid order.
Eigen::MatrixXcd basis_table(const QuantumBasis& basis, const QuadratureGrid& grid);

// <a, b> = sum_node w(node) a(node) conj(b(node)).
cplx l2_inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b,
              const std::vector<double>& w);

// Least-squares coefficients of samples in the basis: solves
// (B* W B) c = B* W s. With an exactness-matched grid the Gram matrix is
// the identity to rounding; gram_cond (if given) receives its condition
// estimate, and callers treat > 1e8 as a numerical failure.
Eigen::VectorXcd project_coefficients(const Eigen::MatrixXcd& btab,
                                      const std::vector<double>& w,
                                      const Eigen::VectorXcd& samples,
                                      double* gram_cond = nullptr);

// Kernel of the operator with matrix M in the orthonormal basis,
// evaluated at a pair of points (metric gauge):
//   K_M(x, y) = sum_jk v_j(x) M_jk conj(v_k(y)).
// M = Id gives the Bergman kernel; its diagonal is dim H_p by homogeneity.
cplx kernel_eval(const QuantumBasis& basis, const Eigen::MatrixXcd& m,
                 const Point& x, const Point& y);

// Coefficients of the coherent state peaked at x0 (not normalized;
// ||.||^2 equals the Bergman diagonal K_Id(x0, x0)).
Eigen::VectorXcd coherent_state(const QuantumBasis& basis, const Point& x0);

// sum_node w(node) K_M(x_node, x_node); equals tr M by the reproducing
// property once the grid is exact (used as an invariant test).
double kernel_trace(const Eigen::MatrixXcd& btab, const std::vector<double>& w,
                    const Eigen::MatrixXcd& m);

}  // namespace btq
