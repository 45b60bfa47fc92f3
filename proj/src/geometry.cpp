// SPDX-License-Identifier: MIT

#include "btq/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace btq {

ChartPoint flip_chart(const ChartPoint& x) {
  // w = 1/z in either direction; caller guarantees zeta != 0.
  return ChartPoint{1.0 / x.zeta, 1 - x.chart};
}

ChartPoint canonical_chart(const ChartPoint& x) {
  if (std::abs(x.zeta) > 1.0) return flip_chart(x);
  return x;
}

ChartPoint in_chart(const ChartPoint& x, int chart) {
  if (x.chart == chart) return x;
  return flip_chart(x);
}

double area_density(const ChartPoint& x) {
  const double q = 1.0 + std::norm(x.zeta);
  return 1.0 / (kPi * q * q);
}

Eigen::Vector3d embed_unit_sphere(const ChartPoint& x) {
  // Stereographic: chart 0 puts z = 0 at the south pole (0,0,-1).
  const double r2 = std::norm(x.zeta);
  const double q = 1.0 + r2;
  Eigen::Vector3d n(2.0 * x.zeta.real() / q, 2.0 * x.zeta.imag() / q,
                    (r2 - 1.0) / q);
  if (x.chart == 1) {
    // z = 1/w: (a,b,c) -> (a,-b,-c) after simplification.
    n[1] = -n[1];
    n[2] = -n[2];
  }
  return n;
}

double factor_distance(const ChartPoint& x, const ChartPoint& y) {
  const Eigen::Vector3d nx = embed_unit_sphere(x);
  const Eigen::Vector3d ny = embed_unit_sphere(y);
  const double chord = (nx - ny).norm();
  const double theta = 2.0 * std::asin(std::min(1.0, 0.5 * chord));
  // Unit-area round metric has R^3 radius 1/(2 sqrt(pi)).
  return theta / (2.0 * std::sqrt(kPi));
}

double distance(const Point& x, const Point& y) {
  if (x.size() != y.size()) throw std::invalid_argument("distance: factor mismatch");
  double s2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = factor_distance(x[i], y[i]);
    s2 += d * d;
  }
  return std::sqrt(s2);
}

bool close_points(const Point& x, const Point& y, double tol) {
  return distance(x, y) <= tol;
}

Eigen::Matrix2d complex_structure_matrix() {
  Eigen::Matrix2d j;
  j << 0.0, -1.0, 1.0, 0.0;
  return j;
}

Eigen::Matrix2d symplectic_matrix(const ChartPoint& x) {
  const double rho = area_density(x);
  Eigen::Matrix2d om;
  om << 0.0, rho, -rho, 0.0;
  return om;
}

Eigen::Matrix2d metric_matrix(const ChartPoint& x, const Eigen::Matrix2d& Js) {
  return symplectic_matrix(x) * Js;
}

Eigen::Matrix2d chart_transition_jacobian(const cplx& z) {
  const cplx m = -1.0 / (z * z);
  Eigen::Matrix2d jac;
  jac << m.real(), -m.imag(), m.imag(), m.real();
  return jac;
}

ModelGeometry ModelGeometry::untwisted(int factors) {
  ModelGeometry g;
  g.factors = factors;
  g.twist.assign(static_cast<std::size_t>(factors), 0);
  return g;
}

ModelGeometry ModelGeometry::twisted(int factors, int m) {
  ModelGeometry g;
  g.factors = factors;
  g.twist.assign(static_cast<std::size_t>(factors), m);
  return g;
}

ModelGeometry ModelGeometry::metaplectic(int factors) {
  return twisted(factors, -1);
}

bool ModelGeometry::is_metaplectic() const {
  return std::all_of(twist.begin(), twist.end(), [](int m) { return m == -1; });
}

int ModelGeometry::line_bundle_degree(int p, int factor) const {
  return p + twist.at(static_cast<std::size_t>(factor));
}

uint64_t ModelGeometry::hash() const {
  // FNV-1a over the defining integers.
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  mix(static_cast<uint64_t>(factors));
  for (int m : twist) mix(static_cast<uint64_t>(static_cast<int64_t>(m)));
  return h;
}

}  // namespace btq
