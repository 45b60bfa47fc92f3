// SPDX-License-Identifier: MIT

#include "btq/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace btq {

QuantumBasis::QuantumBasis(const ModelGeometry& geom, int p) : geom_(geom), p_(p) {
  if (p < 1) throw std::invalid_argument("QuantumBasis: p must be >= 1");
  dim_ = 1;
  log_norms_.resize(static_cast<std::size_t>(geom.factors));
  for (int i = 0; i < geom.factors; ++i) {
    const int n = geom.line_bundle_degree(p, i);
    if (n < 0) throw std::invalid_argument("QuantumBasis: negative bundle degree");
    dim_ *= n + 1;
    auto& ln = log_norms_[static_cast<std::size_t>(i)];
    ln.resize(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k)
      ln[static_cast<std::size_t>(k)] =
          0.5 * (std::lgamma(k + 1.0) + std::lgamma(n - k + 1.0) - std::lgamma(n + 2.0));
  }
}

int QuantumBasis::degree(int factor) const {
  return geom_.line_bundle_degree(p_, factor);
}

int QuantumBasis::factor_dim(int factor) const { return degree(factor) + 1; }

double QuantumBasis::log_norm(int factor, int k) const {
  return log_norms_[static_cast<std::size_t>(factor)][static_cast<std::size_t>(k)];
}

Eigen::VectorXcd QuantumBasis::factor_column(int factor, const ChartPoint& x) const {
  const int n = degree(factor);
  Eigen::VectorXcd v(n + 1);
  const double r = std::abs(x.zeta);
  const double theta = std::arg(x.zeta);
  const double lq = std::log1p(r * r);
  if (r == 0.0) {
    // Only the monomial with zero local power survives at a pole.
    v.setZero();
    const int k0 = (x.chart == 0) ? 0 : n;
    v(k0) = std::exp(-log_norm(factor, k0));
    return v;
  }
  const double lr = std::log(r);
  for (int k = 0; k <= n; ++k) {
    const int pw = (x.chart == 0) ? k : n - k;  // local holomorphic power
    const double mag = pw * lr - 0.5 * n * lq - log_norm(factor, k);
    v(k) = std::polar(std::exp(mag), pw * theta);
  }
  return v;
}

Eigen::VectorXcd QuantumBasis::column(const Point& x) const {
  if (static_cast<int>(x.size()) != geom_.factors)
    throw std::invalid_argument("QuantumBasis::column: point factor mismatch");
  Eigen::VectorXcd out = factor_column(0, x[0]);
  for (int i = 1; i < geom_.factors; ++i) {
    const Eigen::VectorXcd vi = factor_column(i, x[static_cast<std::size_t>(i)]);
    Eigen::VectorXcd next(out.size() * vi.size());
    for (Eigen::Index a = 0; a < out.size(); ++a)
      next.segment(a * vi.size(), vi.size()) = out(a) * vi;
    out.swap(next);
  }
  return out;
}

std::vector<int> QuantumBasis::multi_index(int flat) const {
  std::vector<int> k(static_cast<std::size_t>(geom_.factors));
  for (int i = geom_.factors - 1; i >= 0; --i) {
    const int d = factor_dim(i);
    k[static_cast<std::size_t>(i)] = flat % d;
    flat /= d;
  }
  return k;
}

int QuantumBasis::flat_index(const std::vector<int>& k) const {
  int flat = 0;
  for (int i = 0; i < geom_.factors; ++i)
    flat = flat * factor_dim(i) + k[static_cast<std::size_t>(i)];
  return flat;
}

}  // namespace btq
