// SPDX-License-Identifier: MIT

#include "btq/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace btq {

void gauss_legendre_01(int n, std::vector<double>* nodes, std::vector<double>* weights) {
  // Newton on Legendre P_n over (-1,1), then affine map to (0,1).
  nodes->assign(static_cast<std::size_t>(n), 0.0);
  weights->assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    (*nodes)[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);  // descending x -> ascending u
    (*weights)[static_cast<std::size_t>(i)] = 0.5 * w;
    (*nodes)[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (1.0 + x);
    (*weights)[static_cast<std::size_t>(n - 1 - i)] = 0.5 * w;
  }
}

QuadratureGrid QuadratureGrid::for_degree(const ModelGeometry& geom, int p,
                                          int poly_degree, double oversample) {
  if (oversample < 1.0)
    throw std::invalid_argument("QuadratureGrid: oversample must be >= 1");
  QuadratureGrid g;
  g.factors_.resize(static_cast<std::size_t>(geom.factors));
  for (int i = 0; i < geom.factors; ++i) {
    const int n_bundle = geom.line_bundle_degree(p, i);
    const int du = n_bundle + poly_degree + 2;        // u-degree to integrate exactly
    int n_rad = (du + 2) / 2 + 2;
    int n_ang = 2 * (n_bundle + poly_degree) + 5;     // covers all coupled modes
    n_rad = static_cast<int>(std::ceil(n_rad * oversample));
    n_ang = static_cast<int>(std::ceil(n_ang * oversample));
    FactorGrid& fg = g.factors_[static_cast<std::size_t>(i)];
    gauss_legendre_01(n_rad, &fg.u, &fg.wu);
    fg.r.resize(fg.u.size());
    for (std::size_t k = 0; k < fg.u.size(); ++k)
      fg.r[k] = std::sqrt(fg.u[k] / (1.0 - fg.u[k]));
    fg.n_ang = n_ang;
  }
  return g;
}

std::size_t QuadratureGrid::node_count() const {
  std::size_t n = 1;
  for (const auto& f : factors_) n *= f.node_count();
  return n;
}

Point QuadratureGrid::point(std::size_t flat) const {
  Point x(factors_.size());
  for (std::size_t i = factors_.size(); i-- > 0;) {
    const FactorGrid& f = factors_[i];
    const std::size_t local = flat % f.node_count();
    flat /= f.node_count();
    const std::size_t ia = local % static_cast<std::size_t>(f.n_ang);
    const std::size_t ir = local / static_cast<std::size_t>(f.n_ang);
    const double theta = kTwoPi * double(ia) / double(f.n_ang);
    // Canonical chart: points in the outer hemisphere are handed out in
    // chart 1, so downstream frame phases agree with the flow's convention.
    if (f.r[ir] <= 1.0) {
      x[i].zeta = std::polar(f.r[ir], theta);
      x[i].chart = 0;
    } else {
      x[i].zeta = std::polar(1.0 / f.r[ir], -theta);
      x[i].chart = 1;
    }
  }
  return x;
}

double QuadratureGrid::weight(std::size_t flat) const {
  double w = 1.0;
  for (std::size_t i = factors_.size(); i-- > 0;) {
    const FactorGrid& f = factors_[i];
    const std::size_t local = flat % f.node_count();
    flat /= f.node_count();
    const std::size_t ir = local / static_cast<std::size_t>(f.n_ang);
    w *= f.wu[ir] / double(f.n_ang);
  }
  return w;
}

std::vector<Point> QuadratureGrid::all_points() const {
  std::vector<Point> pts(node_count());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = point(i);
  return pts;
}

std::vector<double> QuadratureGrid::all_weights() const {
  std::vector<double> w(node_count());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = weight(i);
  return w;
}

}  // namespace btq
