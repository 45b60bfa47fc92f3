// SPDX-License-Identifier: MIT
//
// Phase space model: a product of round Riemann spheres, each normalized to
// symplectic area 1.
//
// Conventions (used consistently everywhere):
//   * One factor is CP^1 with affine coordinate z (chart 0) and w = 1/z
//     (chart 1); both charts are holomorphic, so the complex structure has
//     the same matrix J0 = [[0,-1],[1,0]] in real coordinates of either chart.
//   * Symplectic form  omega = (i/2pi) dz dz̄ / (1+|z|^2)^2, total area 1.
//     In real coordinates z = a + ib:  omega(d_a, d_b) = rho(z) with
//     rho = (1/pi)(1+|z|^2)^{-2}; the same expression holds in chart 1.
//   * Riemannian metric g = omega(., J .); the round sphere of diameter
//     sqrt(pi)/2 (radius 1/(2 sqrt(pi)) as a subset of R^3).
//   * Hermitian line bundle O(N): local frames related by s1 = z^{-N} s0,
//     weight h_N(z) = (1+|z|^2)^{-N}, Chern connection alpha_N =
//     -N z̄ dz/(1+|z|^2), curvature -2pi i N omega.
//
// Points carry their active chart; trajectories switch charts with
// hysteresis around |zeta| = 1 so that coordinates stay in |zeta| <~ 1.05.

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace btq {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Chart switch threshold. Strictly above 1 so that points on |zeta| = 1 do
// not flip back and forth; flows switch when |zeta| exceeds this.
constexpr double kChartSwitchRadius = 1.05;

struct ChartPoint {
  cplx zeta{0.0, 0.0};
  int chart = 0;  // 0: coordinate z, 1: coordinate w = 1/z
};

// A point on the product of `factors` spheres.
using Point = std::vector<ChartPoint>;

// Map a factor point to the other chart (w = 1/z). The pole of the active
// chart (zeta == 0) maps to infinity and must be handled by the caller;
// canonical_chart never produces that case.
ChartPoint flip_chart(const ChartPoint& x);

// Returns the representation with |zeta| <= 1 (ties keep the current chart).
ChartPoint canonical_chart(const ChartPoint& x);

// Same point in the requested chart.
ChartPoint in_chart(const ChartPoint& x, int chart);

// Coefficient of the area form in real coordinates of the active chart:
// omega = rho(x) da db, rho = (1/pi)(1+|zeta|^2)^{-2}.
double area_density(const ChartPoint& x);

// Embedding into the unit sphere in R^3 (used only for distances).
Eigen::Vector3d embed_unit_sphere(const ChartPoint& x);

// Geodesic distance on one factor, for the metric above
// (unit area; diameter sqrt(pi)/2).
double factor_distance(const ChartPoint& x, const ChartPoint& y);

// Product geodesic distance: sqrt(sum of squared factor distances).
double distance(const Point& x, const Point& y);

// True if the two points agree up to `tol` in distance.
bool close_points(const Point& x, const Point& y, double tol);

// Standard complex structure as a real 2x2 matrix (chart independent).
Eigen::Matrix2d complex_structure_matrix();

// Matrix of omega restricted to one factor at x, as a bilinear form on real
// tangent coordinates (u^T Omega v): Omega = rho(x) * [[0,1],[-1,0]].
Eigen::Matrix2d symplectic_matrix(const ChartPoint& x);

// Metric matrix g = Omega * J for a possibly transported complex structure
// J_s at the fixed point x (J_s need not equal J0).
Eigen::Matrix2d metric_matrix(const ChartPoint& x, const Eigen::Matrix2d& Js);

// Real 2x2 Jacobian of the chart transition w = 1/z at z (multiplication by
// -1/z^2 viewed as a real-linear map).
Eigen::Matrix2d chart_transition_jacobian(const cplx& z);

// Quantization data for the product: factor count and per-factor twist m_i,
// bundle O(p + m_i) at level p. twist = -1 on every factor is the
// metaplectic-corrected quantization (formally O(p-1) = O(p) (x) K^{1/2}).
struct ModelGeometry {
  int factors = 1;
  std::vector<int> twist;  // size == factors

  static ModelGeometry untwisted(int factors);
  static ModelGeometry twisted(int factors, int m);
  static ModelGeometry metaplectic(int factors);

  bool is_metaplectic() const;
  int line_bundle_degree(int p, int factor) const;  // N_i = p + m_i
  uint64_t hash() const;
};

}  // namespace btq
