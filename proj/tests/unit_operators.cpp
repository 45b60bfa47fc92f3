// SPDX-License-Identifier: MIT
//
// Unit tests for operator assembly (Toeplitz, covariant derivative,
// Kostant-Souriau), spectral helpers, smoothing windows, and sampled
// sections. Height-model matrix elements on O(N) have closed forms,
//     <u^m>_k = (k+1)...(k+m) / ((N+2)...(N+m+1)),
// which pin every assembler path without any quantization theory.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "btq/basis.hpp"
#include "btq/errors.hpp"
#include "btq/geometry.hpp"
#include "btq/grid.hpp"
#include "btq/hamiltonian.hpp"
#include "btq/operators.hpp"
#include "btq/sections.hpp"
#include "btq/window.hpp"

using namespace btq;

TEST_CASE("toeplitz matrix of the height function") {
  const ModelGeometry g1 = ModelGeometry::untwisted(1);
  const Hamiltonian rot = Hamiltonian::preset("rotation", 1);
  const OperatorAssembler asm6(g1, rot, 6);
  const Eigen::MatrixXcd T = asm6.toeplitz();
  REQUIRE(T.rows() == 7);
  for (int k = 0; k <= 6; ++k)
    for (int j = 0; j <= 6; ++j) {
      const double want = (k == j) ? (k + 1.0) / 8.0 : 0.0;
      CHECK(std::abs(T(k, j) - want) < 1e-13);
    }

  // constants quantize to the identity
  const Eigen::MatrixXcd One = asm6.toeplitz_of(Hamiltonian::preset("radial:1", 1));
  CHECK((One - Eigen::MatrixXcd::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-13);

  // u^2 via the extra-degree budget: diag (k+1)(k+2)/((N+2)(N+3))
  const OperatorAssembler asmx(g1, rot, 6, 4);
  const Eigen::MatrixXcd U2 = asmx.toeplitz_of(Hamiltonian::preset("radial:0,0,1", 1));
  for (int k = 0; k <= 6; ++k)
    CHECK(std::abs(U2(k, k) - (k + 1.0) * (k + 2.0) / (8.0 * 9.0)) < 1e-13);
}

TEST_CASE("covariant derivative and curvature correction for the rotation") {
  const ModelGeometry g1 = ModelGeometry::untwisted(1);
  const Hamiltonian rot = Hamiltonian::preset("rotation", 1);
  const OperatorAssembler a(g1, rot, 6);
  const int N = 6;

  // nabla_xi z^k = -2 pi i (k - N u) z^k, so the matrix is diagonal with
  // entries -2 pi i (k - N (k+1)/(N+2)).
  const Eigen::MatrixXcd M = a.covariant_xi();
  for (int k = 0; k <= N; ++k)
    for (int j = 0; j <= N; ++j) {
      const cplx want = (k == j)
          ? cplx(0.0, -kTwoPi) * (k - double(N) * (k + 1.0) / (N + 2.0))
          : cplx(0.0);
      CHECK(std::abs(M(k, j) - want) < 1e-12);
    }

  // (1+|z|^2)^2 u_{z z̄} = 1 - 2u, so the correction is T_p(1 - 2u).
  const Eigen::MatrixXcd C = a.curvature_correction();
  for (int k = 0; k <= N; ++k)
    CHECK(std::abs(C(k, k) - (1.0 - 2.0 * (k + 1.0) / (N + 2.0))) < 1e-12);
}

TEST_CASE("kostant-souriau height spectra are exact") {
  const Hamiltonian rot = Hamiltonian::preset("rotation", 1);
  const int p = 8;

  const OperatorAssembler untw(ModelGeometry::untwisted(1), rot, p);
  const SpectralData su = spectral_decompose(untw.kostant_souriau());
  REQUIRE(su.evals.size() == p + 1);
  for (int k = 0; k <= p; ++k)
    CHECK(su.evals[k] == doctest::Approx(double(k) / p).epsilon(1e-12));

  const OperatorAssembler meta(ModelGeometry::metaplectic(1), rot, p);
  const SpectralData sm = spectral_decompose(meta.kostant_souriau());
  REQUIRE(sm.evals.size() == p);
  for (int k = 0; k < p; ++k)
    CHECK(sm.evals[k] == doctest::Approx((k + 0.5) / p).epsilon(1e-12));
}

TEST_CASE("hermiticity of assembled operators") {
  const ModelGeometry g1 = ModelGeometry::untwisted(1);
  const Hamiltonian rad = Hamiltonian::preset("radial:0,1,0.25", 1);
  const OperatorAssembler a(g1, rad, 32);
  CHECK(hermiticity_defect(a.toeplitz()) < 1e-13);
  CHECK(hermiticity_defect(a.kostant_souriau()) < 1e-12);

  const ModelGeometry m1 = ModelGeometry::metaplectic(1);
  const Hamiltonian per = Hamiltonian::preset("perturbed", 1);
  const OperatorAssembler b(m1, per, 24);
  CHECK(hermiticity_defect(b.kostant_souriau()) < 1e-12);
}

TEST_CASE("spectral decomposition and evolution operators") {
  const ModelGeometry m1 = ModelGeometry::metaplectic(1);
  const Hamiltonian per = Hamiltonian::preset("perturbed:0.3", 1);
  const OperatorAssembler a(m1, per, 16);
  const Eigen::MatrixXcd Q = a.kostant_souriau();
  const SpectralData sd = spectral_decompose(Q);

  for (int i = 1; i < sd.evals.size(); ++i) CHECK(sd.evals[i] >= sd.evals[i - 1]);
  CHECK(unitarity_defect(sd.vecs) < 1e-12);
  const Eigen::MatrixXcd R =
      sd.vecs * sd.evals.asDiagonal().toDenseMatrix().cast<cplx>() * sd.vecs.adjoint();
  CHECK((R - Q).cwiseAbs().maxCoeff() < 1e-12);

  const int p = 16;
  const Eigen::MatrixXcd U1 = evolution_operator(sd, p, 0.3, -1);
  const Eigen::MatrixXcd U2 = evolution_operator(sd, p, 0.45, -1);
  const Eigen::MatrixXcd U3 = evolution_operator(sd, p, 0.75, -1);
  CHECK(unitarity_defect(U1) < 1e-12);
  CHECK((U1 * U2 - U3).cwiseAbs().maxCoeff() < 1e-12);

  // the flow-aligned propagator is the adjoint of the Schroedinger one
  const Eigen::MatrixXcd V1 = evolution_operator(sd, p, 0.3, +1);
  CHECK((V1 - U1.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((evolution_operator(sd, p, 0.0, -1) -
         Eigen::MatrixXcd::Identity(Q.rows(), Q.cols()))
            .cwiseAbs()
            .maxCoeff() < 1e-13);
}

TEST_CASE("window values, mass, and transforms") {
  const WindowFunction win(1.2, 0.7, 8);
  CHECK(win.value(1.2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(win.value(1.2 + 0.7000001) == 0.0);
  CHECK(win.value(1.2 - 0.7000001) == 0.0);
  CHECK(win.support_lo() == doctest::Approx(0.5));
  CHECK(win.support_hi() == doctest::Approx(1.9));
  // even around the center
  CHECK(win.value(1.2 + 0.31) == doctest::Approx(win.value(1.2 - 0.31)).epsilon(1e-15));

  // closed-form mass w sqrt(pi) Gamma(nu+1)/Gamma(nu+3/2)
  const double mass = 0.7 * std::sqrt(kPi) *
                      std::exp(std::lgamma(9.0) - std::lgamma(9.5));
  CHECK(win.mass() == doctest::Approx(mass).epsilon(1e-13));
  CHECK(win.transform0(0.0) == doctest::Approx(mass).epsilon(1e-12));

  // fast path agrees with the adaptive trapezoid
  for (double e : {0.0, 0.17, 1.0, 2.71, 7.3, 15.99, 33.21}) {
    CHECK(std::abs(win.transform0_fast(e) - win.transform0(e)) < 1e-11);
    CHECK(std::abs(win.transform0_fast(-e) - win.transform0_fast(e)) < 1e-15);
    const cplx full = win.transform(e);
    const cplx expect = std::exp(cplx(0.0, -kTwoPi * 1.2 * e)) * win.transform0(e);
    CHECK(std::abs(full - expect) < 1e-12);
  }

  const double cut6 = win.envelope_cut(1e-6);
  const double cut10 = win.envelope_cut(1e-10);
  CHECK(cut6 < cut10);
  CHECK(std::abs(win.transform0(cut10 + 0.37)) < 2e-10);
}

TEST_CASE("window transform satisfies poisson summation") {
  // sum_k ghat(k - x) = sum_m g(m) e^{-2 pi i m x} for any x; with the
  // window centered at 0 only m = -2..2 meet the support. Independent
  // Fourier-analytic pin on transform0 at many arguments.
  const WindowFunction win(0.0, 2.5, 8);
  const double x = 15.3;
  double lhs = 0.0;
  for (int k = -32; k <= 63; ++k) lhs += win.transform0(k - x);
  cplx rhs = 0.0;
  for (int m = -2; m <= 2; ++m)
    rhs += win.value(double(m)) * std::exp(cplx(0.0, -kTwoPi * m * x));
  CHECK(std::abs(rhs.imag()) < 1e-12);
  CHECK(lhs == doctest::Approx(rhs.real()).epsilon(1e-9));
}

TEST_CASE("sampled sections: projection, kernels, coherent states") {
  const ModelGeometry g1 = ModelGeometry::untwisted(1);
  const int p = 9;
  const QuantumBasis basis(g1, p);
  const QuadratureGrid grid = QuadratureGrid::for_degree(g1, p, 0);
  const Eigen::MatrixXcd btab = basis_table(basis, grid);
  const std::vector<double> w = grid.all_weights();
  REQUIRE(btab.rows() == static_cast<int>(grid.node_count()));
  REQUIRE(btab.cols() == basis.dim());

  // projection recovers exact coefficients, Gram is well conditioned
  std::mt19937_64 rng(987654321);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXcd c(basis.dim());
  for (int i = 0; i < c.size(); ++i) c[i] = cplx(unif(rng), unif(rng));
  const Eigen::VectorXcd samples = btab * c;
  double gram_cond = 0.0;
  const Eigen::VectorXcd c2 = project_coefficients(btab, w, samples, &gram_cond);
  CHECK((c2 - c).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(gram_cond < 1.0 + 1e-10);

  // l2_inner of two basis columns = delta
  CHECK(std::abs(l2_inner(btab.col(2), btab.col(2), w) - 1.0) < 1e-13);
  CHECK(std::abs(l2_inner(btab.col(2), btab.col(5), w)) < 1e-13);

  // Bergman diagonal equals dim H_p
  const Point x0{ChartPoint{cplx(0.35, -0.6), 0}};
  const Eigen::MatrixXcd Id = Eigen::MatrixXcd::Identity(basis.dim(), basis.dim());
  CHECK(std::abs(kernel_eval(basis, Id, x0, x0) - cplx(basis.dim())) < 1e-10);

  // coherent state: <s, coh_x> evaluates s at x (reproducing property)
  const Eigen::VectorXcd coh = coherent_state(basis, x0);
  CHECK(std::abs(coh.squaredNorm() - double(basis.dim())) < 1e-10);
  cplx pairing = 0.0, value_at = 0.0;
  const Eigen::VectorXcd vx = basis.column(x0);
  for (int k = 0; k < c.size(); ++k) {
    pairing += c[k] * std::conj(coh[k]);
    value_at += c[k] * vx[k];
  }
  CHECK(std::abs(pairing - value_at) < 1e-12);

  // kernel_trace recovers tr M for a random hermitian M
  Eigen::MatrixXcd H(basis.dim(), basis.dim());
  for (int i = 0; i < H.rows(); ++i)
    for (int j = 0; j < H.cols(); ++j) H(i, j) = cplx(unif(rng), unif(rng));
  H = (H + Eigen::MatrixXcd(H.adjoint())).eval();
  CHECK(kernel_trace(btab, w, H) == doctest::Approx(H.trace().real()).epsilon(1e-10));
}
