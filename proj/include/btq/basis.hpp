// SPDX-License-Identifier: MIT
//
// Orthonormal monomial basis of H^0(O(N_1) x ... x O(N_s)) at level p,
// N_i = p + twist_i. Per factor, ||z^k||^2 = k!(N-k)!/(N+1)!; all basis
// evaluations are done in the metric ("unitary") gauge
//     v_k(x) = z^k (1+|z|^2)^{-N/2} / n_k            (chart 0)
//            = w^{N-k} (1+|w|^2)^{-N/2} / n_k        (chart 1)
// whose values are uniformly bounded by sqrt(N+1). Columns are generated by
// a two-sided recurrence anchored at the magnitude peak k* ~ N u so that no
// intermediate under/overflows even at N ~ 10^3.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "btq/geometry.hpp"

namespace btq {

class QuantumBasis {
 public:
  QuantumBasis(const ModelGeometry& geom, int p);

  int p() const { return p_; }
  int factors() const { return geom_.factors; }
  const ModelGeometry& geometry() const { return geom_; }
  int degree(int factor) const;                 // N_i
  int dim() const { return dim_; }              // prod (N_i + 1)
  int factor_dim(int factor) const;             // N_i + 1

  // log ||z^k|| for one factor.
  double log_norm(int factor, int k) const;

  // Metric-gauge values of all (N+1) monomials of one factor at a point.
  Eigen::VectorXcd factor_column(int factor, const ChartPoint& x) const;

  // Metric-gauge values of the full product basis at a point
  // (Kronecker order: factor 0 slowest).
  Eigen::VectorXcd column(const Point& x) const;

  // Multi-index <-> flat index in the Kronecker order above.
  std::vector<int> multi_index(int flat) const;
  int flat_index(const std::vector<int>& k) const;

 private:
  ModelGeometry geom_;
  int p_;
  int dim_;
  std::vector<std::vector<double>> log_norms_;  // [factor][k]
};

}  // namespace btq
