// SPDX-License-Identifier: MIT

#include "btq/operators.hpp"

#include <cmath>

#include "btq/errors.hpp"
#include "btq/grid.hpp"

namespace btq {

namespace {

// Bivariate coefficient helpers; c(a,b) multiplies z^a z̄^b. Sizes are free.
using Coef = Eigen::MatrixXcd;

Coef mul_q(const Coef& x) {  // * (1 + z z̄)
  Coef out = Coef::Zero(x.rows() + 1, x.cols() + 1);
  out.topLeftCorner(x.rows(), x.cols()) += x;
  out.bottomRightCorner(x.rows(), x.cols()) += x;
  return out;
}

Coef mul_z(const Coef& x) {
  Coef out = Coef::Zero(x.rows() + 1, x.cols());
  out.bottomRows(x.rows()) = x;
  return out;
}

Coef mul_zb(const Coef& x) {
  Coef out = Coef::Zero(x.rows(), x.cols() + 1);
  out.rightCols(x.cols()) = x;
  return out;
}

Coef d_z(const Coef& x) {
  if (x.rows() <= 1) return Coef::Zero(1, x.cols());
  Coef out(x.rows() - 1, x.cols());
  for (Eigen::Index a = 1; a < x.rows(); ++a) out.row(a - 1) = double(a) * x.row(a);
  return out;
}

Coef d_zb(const Coef& x) {
  if (x.cols() <= 1) return Coef::Zero(x.rows(), 1);
  Coef out(x.rows(), x.cols() - 1);
  for (Eigen::Index b = 1; b < x.cols(); ++b) out.col(b - 1) = double(b) * x.col(b);
  return out;
}

// Numerator of (1+r^2)^2 f_zz̄ over (1+r^2)^deg for a factor polynomial.
Coef curvature_numerator(const FactorPoly& fp) {
  const int d = fp.deg;
  const Coef a0 = mul_q(d_z(fp.c)) - double(d) * mul_zb(fp.c);  // f_z numerator
  return mul_q(d_zb(a0)) - double(d + 1) * mul_z(a0);
}

// Numerator of -2 pi i (1+r^2)^2 f_z̄ over (1+r^2)^(deg-1).
Coef xi_numerator(const FactorPoly& fp) {
  const int d = fp.deg;
  const Coef b0 = mul_q(d_zb(fp.c)) - double(d) * mul_z(fp.c);  // f_z̄ numerator
  return cplx(0.0, -kTwoPi) * b0;
}

}  // namespace

SpectralData spectral_decompose(const Eigen::MatrixXcd& hermitian) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian);
  if (es.info() != Eigen::Success)
    throw numeric_error("spectral_decompose: eigensolver failed");
  return SpectralData{es.eigenvalues(), es.eigenvectors()};
}

Eigen::MatrixXcd evolution_operator(const SpectralData& sd, int p, double t, int sign) {
  Eigen::VectorXcd phases(sd.evals.size());
  for (Eigen::Index k = 0; k < sd.evals.size(); ++k)
    phases(k) = std::polar(1.0, sign * kTwoPi * t * double(p) * sd.evals(k));
  return sd.vecs * phases.asDiagonal() * sd.vecs.adjoint();
}

double hermiticity_defect(const Eigen::MatrixXcd& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_defect(const Eigen::MatrixXcd& u) {
  Eigen::MatrixXcd d = u.adjoint() * u;
  d -= Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  return d.cwiseAbs().maxCoeff();
}

OperatorAssembler::OperatorAssembler(const ModelGeometry& geom, const Hamiltonian& f,
                                     int p, int extra_degree)
    : geom_(geom), f_(&f), p_(p), basis_(geom, p) {
  if (f.factors() != geom.factors)
    throw config_error("OperatorAssembler: Hamiltonian/geometry factor mismatch");
  int degmax = 0;
  for (const auto& t : f.terms())
    for (const auto& fp : t.factor) degmax = std::max(degmax, fp.deg);
  degmax += extra_degree;

  const std::size_t s = static_cast<std::size_t>(geom.factors);
  u_.resize(s);
  wu_.resize(s);
  r_.resize(s);
  etab_.resize(s);
  for (int fi = 0; fi < geom.factors; ++fi) {
    const int n = geom.line_bundle_degree(p, fi);
    // Radial u-degree after mode selection is at most n + degmax + 2.
    const int n_rad = (n + degmax + 4) / 2 + 3;
    auto& u = u_[static_cast<std::size_t>(fi)];
    auto& wu = wu_[static_cast<std::size_t>(fi)];
    auto& r = r_[static_cast<std::size_t>(fi)];
    gauss_legendre_01(n_rad, &u, &wu);
    r.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = std::sqrt(u[i] / (1.0 - u[i]));
    Eigen::MatrixXd& e = etab_[static_cast<std::size_t>(fi)];
    e.resize(n + 1, static_cast<Eigen::Index>(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double lr = std::log(r[i]);
      const double lq = std::log1p(r[i] * r[i]);
      for (int k = 0; k <= n; ++k)
        e(k, static_cast<Eigen::Index>(i)) =
            std::exp(k * lr - 0.5 * n * lq - basis_.log_norm(fi, k));
    }
  }
}

Eigen::MatrixXcd OperatorAssembler::factor_matrix(int fi, const Eigen::MatrixXcd& num,
                                                  int g, int pshift) const {
  const int n = basis_.degree(fi);
  const auto& u = u_[static_cast<std::size_t>(fi)];
  const auto& wu = wu_[static_cast<std::size_t>(fi)];
  const auto& r = r_[static_cast<std::size_t>(fi)];
  const Eigen::MatrixXd& e = etab_[static_cast<std::size_t>(fi)];
  const std::size_t nr = u.size();

  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  std::vector<double> phi(nr);
  for (Eigen::Index a = 0; a < num.rows(); ++a) {
    for (Eigen::Index b = 0; b < num.cols(); ++b) {
      const cplx cab = num(a, b);
      if (cab == 0.0) continue;
      const int rp = static_cast<int>(a + b) + pshift;  // radial power on top of E_j E_k
      for (std::size_t i = 0; i < nr; ++i)
        phi[i] = wu[i] * std::pow(r[i], rp) * std::pow(1.0 - u[i], g);
      const int delta = static_cast<int>(a - b) + pshift;  // j - k
      for (int k = std::max(0, -delta); k <= std::min(n, n - delta); ++k) {
        const int j = k + delta;
        double acc = 0.0;
        for (std::size_t i = 0; i < nr; ++i)
          acc += phi[i] * e(j, static_cast<Eigen::Index>(i)) *
                 e(k, static_cast<Eigen::Index>(i));
        m(j, k) += cab * acc;
      }
    }
  }
  return m;
}

Eigen::MatrixXcd OperatorAssembler::factor_toeplitz(int fi, const FactorPoly& fp) const {
  return factor_matrix(fi, fp.c, fp.deg, 0);
}

Eigen::MatrixXcd OperatorAssembler::kron_all(const std::vector<Eigen::MatrixXcd>& m) const {
  Eigen::MatrixXcd out = m[0];
  for (std::size_t i = 1; i < m.size(); ++i) {
    const Eigen::MatrixXcd& b = m[i];
    Eigen::MatrixXcd next(out.rows() * b.rows(), out.cols() * b.cols());
    for (Eigen::Index rr = 0; rr < out.rows(); ++rr)
      for (Eigen::Index cc = 0; cc < out.cols(); ++cc)
        next.block(rr * b.rows(), cc * b.cols(), b.rows(), b.cols()) = out(rr, cc) * b;
    out.swap(next);
  }
  return out;
}

Eigen::MatrixXcd OperatorAssembler::toeplitz_of(const Hamiltonian& g) const {
  if (g.factors() != geom_.factors)
    throw config_error("toeplitz_of: factor mismatch");
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(basis_.dim(), basis_.dim());
  for (const auto& term : g.terms()) {
    std::vector<Eigen::MatrixXcd> parts;
    parts.reserve(term.factor.size());
    for (int fi = 0; fi < geom_.factors; ++fi)
      parts.push_back(factor_toeplitz(fi, term.factor[static_cast<std::size_t>(fi)]));
    total += kron_all(parts);
  }
  return total;
}

Eigen::MatrixXcd OperatorAssembler::toeplitz() const { return toeplitz_of(*f_); }

Eigen::MatrixXcd OperatorAssembler::covariant_xi() const {
  const int dim = basis_.dim();
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& term : f_->terms()) {
    for (int fi = 0; fi < geom_.factors; ++fi) {
      const FactorPoly& fp = term.factor[static_cast<std::size_t>(fi)];
      if (fp.deg == 0) continue;  // xi part of a constant factor vanishes
      const int n = basis_.degree(fi);
      const Coef xin = xi_numerator(fp);
      // xi^z d_z hits z^k with k z^{k-1}; alpha_N(xi) = -N z̄ xi^z/(1+r^2).
      Eigen::MatrixXcd deriv = factor_matrix(fi, xin, fp.deg - 1, -1);
      for (int k = 0; k <= n; ++k) deriv.col(k) *= double(k);
      const Eigen::MatrixXcd conn =
          factor_matrix(fi, -double(n) * mul_zb(xin), fp.deg, 0);

      std::vector<Eigen::MatrixXcd> parts;
      parts.reserve(term.factor.size());
      for (int fj = 0; fj < geom_.factors; ++fj) {
        if (fj == fi)
          parts.push_back(deriv + conn);
        else
          parts.push_back(factor_toeplitz(fj, term.factor[static_cast<std::size_t>(fj)]));
      }
      total += kron_all(parts);
    }
  }
  return total;
}

Eigen::MatrixXcd OperatorAssembler::curvature_correction() const {
  const int dim = basis_.dim();
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& term : f_->terms()) {
    for (int fi = 0; fi < geom_.factors; ++fi) {
      const FactorPoly& fp = term.factor[static_cast<std::size_t>(fi)];
      if (fp.deg == 0) continue;
      std::vector<Eigen::MatrixXcd> parts;
      parts.reserve(term.factor.size());
      for (int fj = 0; fj < geom_.factors; ++fj) {
        if (fj == fi)
          parts.push_back(factor_matrix(fi, curvature_numerator(fp), fp.deg, 0));
        else
          parts.push_back(factor_toeplitz(fj, term.factor[static_cast<std::size_t>(fj)]));
      }
      total += kron_all(parts);
    }
  }
  return total;
}

Eigen::MatrixXcd OperatorAssembler::kostant_souriau() const {
  Eigen::MatrixXcd q = toeplitz();
  q += cplx(0.0, 1.0 / (kTwoPi * p_)) * covariant_xi();
  if (geom_.is_metaplectic()) q += (0.5 / p_) * curvature_correction();
  return q;
}

}  // namespace btq
