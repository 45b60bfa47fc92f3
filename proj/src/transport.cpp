// SPDX-License-Identifier: MIT

#include "btq/transport.hpp"

#include <cmath>
#include <limits>

#include "btq/errors.hpp"
#include "btq/grid.hpp"
#include "btq/sections.hpp"

namespace btq {

namespace {

double log_q(const ChartPoint& c) { return std::log1p(std::norm(c.zeta)); }

}  // namespace

TransportResult pullback_matrix(const Hamiltonian& f, const ModelGeometry& geom,
                                int p, double t, const TransportOptions& opt) {
  for (int m : geom.twist) {
    if (m != 0 && m != -1)
      throw config_error("pullback_matrix: only twist 0 or -1 supported");
  }
  if (opt.half_form && !geom.is_metaplectic())
    throw config_error("pullback_matrix: half_form requires the metaplectic model");
  if (geom.is_metaplectic() && !opt.half_form)
    throw config_error("pullback_matrix: metaplectic model requires half_form");

  const QuantumBasis basis(geom, p);
  const QuadratureGrid grid =
      QuadratureGrid::for_degree(geom, p, opt.extra_degree, opt.oversample);
  const std::size_t nodes = grid.node_count();
  const std::vector<double> w = grid.all_weights();
  const Eigen::MatrixXcd btab = basis_table(basis, grid);

  FlowOptions fopt = opt.flow;
  fopt.lift = true;
  fopt.hol_lift = opt.half_form;
  FlowIntegrator integ(f, fopt);

  Eigen::MatrixXcd vt(static_cast<Eigen::Index>(nodes), basis.dim());
  double drift = 0.0;
  for (std::size_t n = 0; n < nodes; ++n) {
    const Point xn = grid.point(n);
    FlowState st = integ.start(xn);
    integ.advance(st, -t);
    // Transport cocycle, log-assembled; |exp(L)| = 1 up to rounding.
    cplx L(0.0, kTwoPi * t * p * st.f0);
    for (int i = 0; i < geom.factors; ++i) {
      const std::size_t si = static_cast<std::size_t>(i);
      const int n_h = geom.line_bundle_degree(p, i);
      L -= double(p) * st.lift_log[si];
      if (opt.half_form) L += 0.5 * st.hol_log[si];
      L += 0.5 * n_h * (log_q(st.x[si]) - log_q(xn[si]));
    }
    drift = std::max(drift, std::abs(L.real()));
    vt.row(static_cast<Eigen::Index>(n)) =
        std::exp(L) * basis.column(st.x).transpose();
  }

  Eigen::VectorXd wv(static_cast<Eigen::Index>(nodes));
  for (std::size_t n = 0; n < nodes; ++n) wv(static_cast<Eigen::Index>(n)) = w[n];
  const Eigen::MatrixXcd wb = wv.asDiagonal() * btab;
  const Eigen::MatrixXcd gram = btab.adjoint() * wb;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues()(basis.dim() - 1);

  TransportResult out;
  out.gram_cond = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
  out.modulus_drift = drift;
  if (lo <= 0.0) throw numeric_error("pullback_matrix: singular Gram matrix");
  out.op = gram.ldlt().solve(wb.adjoint() * vt);
  return out;
}

TransportResult quantum_transport(const Hamiltonian& f, const ModelGeometry& geom,
                                  int p, double t, const TransportOptions& opt) {
  if (opt.steps < 1) throw config_error("quantum_transport: steps must be >= 1");
  TransportResult step = pullback_matrix(f, geom, p, t / opt.steps, opt);
  if (step.gram_cond > 1e8)
    throw numeric_error("quantum_transport: compression Gram condition > 1e8");
  step.op = matrix_power(step.op, opt.steps);
  return step;
}

Eigen::MatrixXcd matrix_power(const Eigen::MatrixXcd& m, long k) {
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  Eigen::MatrixXcd base = m;
  while (k > 0) {
    if (k & 1L) acc = acc * base;
    base = base * base;
    k >>= 1;
  }
  return acc;
}

}  // namespace btq
