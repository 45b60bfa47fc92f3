// SPDX-License-Identifier: MIT
//
// Product quadrature grids. Per factor: Gauss-Legendre nodes in the action
// coordinate u = r^2/(1+r^2) in (0,1) crossed with a uniform angular grid.
// With the unit-area form, integrals reduce to
//     int f omega = int_0^1 (1/n_ang) sum_j f(r(u) e^{i theta_j}) du ,
// and every integrand this code ever meets is, per angular mode, a
// polynomial in u of degree <= (bundle degree + poly degree): the grid is
// chosen exact for those, so Gram matrices of the monomial basis come out
// orthonormal to rounding.

#pragma once

#include <cstddef>
#include <vector>

#include "btq/geometry.hpp"

namespace btq {

struct FactorGrid {
  std::vector<double> u, wu;  // Gauss-Legendre nodes/weights on (0,1)
  std::vector<double> r;      // r = sqrt(u/(1-u))
  int n_ang = 0;              // theta_j = 2 pi j / n_ang, weight 1/n_ang

  std::size_t radial_count() const { return u.size(); }
  std::size_t node_count() const { return u.size() * static_cast<std::size_t>(n_ang); }
};

class QuadratureGrid {
 public:
  // Exact for per-factor integrands with u-degree <= max_u_degree and
  // angular modes |m| < n_ang; both get a safety margin on top of the
  // caller's request. oversample >= 1 scales both counts.
  static QuadratureGrid for_degree(const ModelGeometry& geom, int p, int poly_degree,
                                   double oversample = 1.0);

  const std::vector<FactorGrid>& factors() const { return factors_; }
  const FactorGrid& factor(std::size_t i) const { return factors_[i]; }

  // Flattened product grid (row-major over factors, angular fastest).
  std::size_t node_count() const;
  Point point(std::size_t flat_index) const;
  double weight(std::size_t flat_index) const;

  // All product nodes/weights materialized (small factor counts only).
  std::vector<Point> all_points() const;
  std::vector<double> all_weights() const;

 private:
  std::vector<FactorGrid> factors_;
};

// Gauss-Legendre rule on (0,1), exact for polynomials of degree 2n-1.
void gauss_legendre_01(int n, std::vector<double>* nodes, std::vector<double>* weights);

}  // namespace btq
