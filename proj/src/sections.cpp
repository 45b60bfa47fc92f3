// SPDX-License-Identifier: MIT

#include "btq/sections.hpp"

#include <cmath>
#include <limits>

#include "btq/errors.hpp"
#include "btq/simd.hpp"

namespace btq {

Eigen::MatrixXcd basis_table(const QuantumBasis& basis, const QuadratureGrid& grid) {
  const std::size_t nodes = grid.node_count();
  Eigen::MatrixXcd btab(static_cast<Eigen::Index>(nodes), basis.dim());
  for (std::size_t n = 0; n < nodes; ++n) {
    btab.row(static_cast<Eigen::Index>(n)) = basis.column(grid.point(n)).transpose();
  }
  return btab;
}

cplx l2_inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b,
              const std::vector<double>& w) {
  if (a.size() != b.size() || static_cast<std::size_t>(a.size()) != w.size()) {
    throw config_error("l2_inner: size mismatch");
  }
  return simd::weighted_dot(a.data(), b.data(), w.data(), w.size());
}

Eigen::VectorXcd project_coefficients(const Eigen::MatrixXcd& btab,
                                      const std::vector<double>& w,
                                      const Eigen::VectorXcd& samples,
                                      double* gram_cond) {
  const Eigen::Index nodes = btab.rows();
  const Eigen::Index dim = btab.cols();
  if (samples.size() != nodes || static_cast<Eigen::Index>(w.size()) != nodes) {
    throw config_error("project_coefficients: size mismatch");
  }
  Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(w.data(), nodes);
  Eigen::MatrixXcd wb = wv.asDiagonal() * btab;
  Eigen::MatrixXcd gram = btab.adjoint() * wb;
  Eigen::VectorXcd rhs = wb.adjoint() * samples;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues()(dim - 1);
  if (gram_cond != nullptr) {
    *gram_cond = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
  }
  if (lo <= 0.0) {
    throw numeric_error("projection Gram matrix is numerically singular");
  }
  return gram.ldlt().solve(rhs);
}

cplx kernel_eval(const QuantumBasis& basis, const Eigen::MatrixXcd& m,
                 const Point& x, const Point& y) {
  Eigen::VectorXcd vx = basis.column(x);
  Eigen::VectorXcd vy = basis.column(y);
  return (vx.transpose() * (m * vy.conjugate())).value();
}

Eigen::VectorXcd coherent_state(const QuantumBasis& basis, const Point& x0) {
  return basis.column(x0).conjugate();
}

double kernel_trace(const Eigen::MatrixXcd& btab, const std::vector<double>& w,
                    const Eigen::MatrixXcd& m) {
  const Eigen::Index nodes = btab.rows();
  double acc = 0.0;
  for (Eigen::Index n = 0; n < nodes; ++n) {
    const Eigen::VectorXcd row = btab.row(n).transpose();
    acc += w[static_cast<std::size_t>(n)] *
           (row.transpose() * (m * row.conjugate())).value().real();
  }
  return acc;
}

}  // namespace btq
