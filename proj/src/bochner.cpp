// SPDX-License-Identifier: MIT

#include "btq/bochner.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "btq/errors.hpp"
#include "btq/grid.hpp"

namespace btq {

namespace {

// Chart-0 covariant derivative of s = z^a zbar^c Q^{-K} in the O(N) frame,
// Q = 1 + |z|^2, connection term -N zbar / Q:
//   D_z s    = a z^{a-1} zbar^c Q^{-K} - (K+N) z^a zbar^{c+1} Q^{-K-1}
//   D_zbar s = c z^a zbar^{c-1} Q^{-K} - K z^{a+1} zbar^c Q^{-K-1}
// All samples are taken in the metric gauge (extra factor Q^{-N/2}) and built
// from logs so large radii stay in range.
struct TrialTerm {
  double coeff;
  int pow_z, pow_zb, pow_q;  // z^pow_z zbar^pow_zb Q^{-pow_q}
};

std::complex<double> eval_terms(const TrialTerm* terms, int count, double r, double theta,
                                double log_r, double log_q, double half_n) {
  std::complex<double> acc(0.0, 0.0);
  for (int t = 0; t < count; ++t) {
    const TrialTerm& tt = terms[t];
    if (tt.coeff == 0.0) continue;
    if (r == 0.0 && tt.pow_z + tt.pow_zb > 0) continue;
    const double mag = std::exp((tt.pow_z + tt.pow_zb) * log_r - (tt.pow_q + half_n) * log_q);
    acc += tt.coeff * mag * std::polar(1.0, (tt.pow_z - tt.pow_zb) * theta);
  }
  return acc;
}

}  // namespace

BochnerSpectrum bochner_spectrum(int p, int enrichment) {
  if (p < 1) throw config_error("bochner: p must be positive");
  const int K = enrichment;
  if (K < 1 || K > 16) throw config_error("bochner: enrichment out of range [1,16]");
  const int N = p;  // untwisted line bundle degree

  // Family size and the quadrature exactness budget. Matrix entries are, per
  // angular mode, polynomials in u of degree <= N + 2K + 2 (global smoothness
  // of the sections kills every negative (1-u) power).
  const int na = N + K + 1, nc = K + 1;
  const int dim = na * nc;
  const int u_degree = N + 2 * K + 2;
  const int n_rad = u_degree / 2 + 4;
  const int n_ang = 2 * (N + K) + 5;

  std::vector<double> u, wu;
  gauss_legendre_01(n_rad, &u, &wu);

  Eigen::MatrixXcd samples(n_rad * n_ang, dim);       // metric-gauge values
  Eigen::MatrixXcd grad_z(n_rad * n_ang, dim);        // D_z, metric gauge
  Eigen::MatrixXcd grad_zb(n_rad * n_ang, dim);       // D_zbar, metric gauge
  Eigen::VectorXd w_mass(n_rad * n_ang), w_stiff(n_rad * n_ang);

  const double half_n = 0.5 * N;
  for (int ir = 0; ir < n_rad; ++ir) {
    const double q = 1.0 / (1.0 - u[ir]);
    const double r = std::sqrt(u[ir] * q);
    const double log_r = std::log(r), log_q = std::log(q);
    for (int ia = 0; ia < n_ang; ++ia) {
      const std::size_t row = static_cast<std::size_t>(ir) * n_ang + ia;
      const double theta = kTwoPi * ia / n_ang;
      const double w = wu[ir] / n_ang;
      w_mass(row) = w;
      w_stiff(row) = w * kTwoPi * q * q;  // |grad|^2 carries the inverse metric
      int col = 0;
      for (int a = 0; a < na; ++a) {
        for (int c = 0; c < nc; ++c, ++col) {
          const TrialTerm val[1] = {{1.0, a, c, K}};
          const TrialTerm dz[2] = {{double(a), a - 1, c, K}, {-double(K + N), a, c + 1, K + 1}};
          const TrialTerm dzb[2] = {{double(c), a, c - 1, K}, {-double(K), a + 1, c, K + 1}};
          samples(row, col) = eval_terms(val, 1, r, theta, log_r, log_q, half_n);
          grad_z(row, col) = eval_terms(dz, 2, r, theta, log_r, log_q, half_n);
          grad_zb(row, col) = eval_terms(dzb, 2, r, theta, log_r, log_q, half_n);
        }
      }
    }
  }

  const Eigen::MatrixXcd mass = samples.adjoint() * w_mass.asDiagonal() * samples;
  const Eigen::MatrixXcd stiff = grad_z.adjoint() * w_stiff.asDiagonal() * grad_z +
                                 grad_zb.adjoint() * w_stiff.asDiagonal() * grad_zb;

  // Canonical orthogonalization: drop Gram directions below the rank guard,
  // whiten, and solve the reduced Hermitian problem.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> gram(mass);
  if (gram.info() != Eigen::Success) throw numeric_error("bochner: Gram eigensolve failed");
  const double gmax = gram.eigenvalues().maxCoeff();
  const double cutoff = gmax * 1e-12;
  int kept = 0;
  for (int i = 0; i < dim; ++i)
    if (gram.eigenvalues()(i) > cutoff) ++kept;
  if (kept <= N + 1) throw numeric_error("bochner: trial family collapsed under rank guard");
  Eigen::MatrixXcd whiten(dim, kept);
  for (int i = 0, j = 0; i < dim; ++i) {
    if (gram.eigenvalues()(i) <= cutoff) continue;
    whiten.col(j++) = gram.eigenvectors().col(i) / std::sqrt(gram.eigenvalues()(i));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ritz(whiten.adjoint() * stiff * whiten);
  if (ritz.info() != Eigen::Success) throw numeric_error("bochner: Ritz eigensolve failed");

  BochnerSpectrum out;
  out.dim_hp = N + 1;
  out.kept_modes = kept;
  const double shift = kTwoPi * p;  // single factor, n = 1
  out.shifted.resize(kept);
  for (int i = 0; i < kept; ++i) out.shifted[i] = ritz.eigenvalues()(i) - shift;
  std::sort(out.shifted.begin(), out.shifted.end());
  out.zero_tol = 1e-4 * shift;
  out.zero_count = 0;
  for (double v : out.shifted)
    if (std::abs(v) <= out.zero_tol) ++out.zero_count;
  out.spectral_gap = 0.0;
  for (double v : out.shifted) {
    if (v > out.zero_tol) {
      out.spectral_gap = v + shift;  // report the unshifted Ritz value
      break;
    }
  }
  return out;
}

}  // namespace btq
