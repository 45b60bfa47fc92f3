// SPDX-License-Identifier: MIT
//
// Classical observables. Each factor contribution is a rational function
//
//     P(zeta, zetā) / (1 + |zeta|^2)^d,   deg_z P <= d, deg_z̄ P <= d,
//
// the natural class closed under the chart transition z -> 1/w (the chart-1
// coefficient matrix is the index-reversed one). A Hamiltonian is a sum of
// products of such factor polynomials; the total must be real-valued.
//
// The Hamiltonian vector field for  iota_xi omega = df  is
//     xi^zeta_i = -2 pi i (1+|zeta_i|^2)^2 (df/dzetā_i),
// valid verbatim in either chart (omega has the same coordinate expression).
// For f0 = |z|^2/(1+|z|^2) this gives z(t) = e^{-2 pi i t} z.

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "btq/geometry.hpp"

namespace btq {

// One factor's rational piece: sum c(a,b) zeta^a zetā^b / (1+|zeta|^2)^deg.
struct FactorPoly {
  int deg = 0;
  Eigen::MatrixXcd c;  // (deg+1) x (deg+1)

  static FactorPoly constant(cplx v);
  static FactorPoly height(double weight);  // weight * |z|^2/(1+|z|^2)
  FactorPoly chart_flipped() const;         // coefficients for chart 1
  bool is_constant(double tol = 0.0) const;
};

struct ProductTerm {
  std::vector<FactorPoly> factor;  // one per sphere factor
};

// First and second partial derivatives of the full Hamiltonian at a point,
// in each factor's active chart. fzzb(i,j) = d^2 f / dz_i dz̄_j, etc.
struct Jet2 {
  double f = 0.0;
  std::vector<cplx> fz, fzb;
  Eigen::MatrixXcd fzz, fzzb, fzbzb;
};

class Hamiltonian {
 public:
  Hamiltonian(int factors, std::vector<ProductTerm> terms,
              std::string description = "");

  // Preset grammar used by configs and the CLI:
  //   rotation                  f = sum_i u_i,  u = |z|^2/(1+|z|^2)
  //   radial:c0,c1,...          one factor, f = sum_j c_j u^j
  //   perturbed[:eps]           one factor, f = u + eps Re z^2/(1+|z|^2)^2, eps = 0.2
  //   product:w1,w2,...         f = sum_i w_i u_i
  static Hamiltonian preset(const std::string& name, int factors);

  int factors() const { return factors_; }
  const std::vector<ProductTerm>& terms() const { return terms_; }
  const std::string& description() const { return description_; }

  double value(const Point& x) const;
  Jet2 jet(const Point& x) const;

  // Hamiltonian vector field components xi^{zeta_i} in active charts.
  std::vector<cplx> xi(const Point& x) const;

  // Real 2s x 2s Jacobian of the vector field (variational right-hand side),
  // rows/cols ordered (Re_1, Im_1, Re_2, Im_2, ...) in active charts.
  Eigen::MatrixXd xi_jacobian(const Point& x) const;

  // Same quantities from an already computed jet (one evaluation per
  // right-hand side in the integrator).
  static std::vector<cplx> xi_from_jet(const Jet2& j, const Point& x);
  static Eigen::MatrixXd xi_jacobian_from_jet(const Jet2& j, const Point& x);

  // If f = sum_i f_i(z_i), the list of single-factor Hamiltonians f_i
  // (constants folded into factor 0); otherwise nullopt. Enables
  // per-factor spectral fast paths for product models.
  std::optional<std::vector<Hamiltonian>> separable_parts() const;

  // Stable content hash (coefficients, degrees, factor count).
  uint64_t hash() const;

 private:
  int factors_;
  std::vector<ProductTerm> terms_;
  std::vector<std::vector<FactorPoly>> flipped_;  // chart-1 coefficient copies
  std::string description_;

  const FactorPoly& poly_for(const ChartPoint& x, std::size_t term,
                             std::size_t factor) const;
};

}  // namespace btq
