// SPDX-License-Identifier: MIT
//
// Unit tests for smoothed spectral sums, the orbit-sum trace model, the
// oscillatory least-squares fit, and the variational Laplacian spectrum.
// Brute-force double loops over synthetic spectra pin the cutoff logic;
// synthetic traces with known coefficients pin the fit.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "btq/bochner.hpp"
#include "btq/errors.hpp"
#include "btq/geometry.hpp"
#include "btq/gutzwiller.hpp"
#include "btq/hamiltonian.hpp"
#include "btq/operators.hpp"
#include "btq/orbits.hpp"
#include "btq/trace.hpp"
#include "btq/window.hpp"

using namespace btq;

namespace {

std::vector<double> random_sorted(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = unif(rng);
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("smoothed trace equals the unfiltered spectral sum") {
  std::mt19937_64 rng(555001);
  const std::vector<double> evals = random_sorted(300, rng);
  const WindowFunction win(0.0, 0.6, 8);
  const int p = 40;
  const double c = 0.5;

  const SmoothedTrace st = smoothed_trace(evals, p, c, win);
  cplx brute = 0.0;
  for (double lam : evals) brute += win.transform(p * (lam - c));
  CHECK(std::abs(st.value - brute) < 1e-11 * evals.size());
  CHECK(st.contributing > 0);
  CHECK(st.contributing <= static_cast<long>(evals.size()));

  // at large p the cutoff keeps a strict subset near the level
  const SmoothedTrace sharp = smoothed_trace(evals, 4000, c, win);
  cplx brute_sharp = 0.0;
  for (double lam : evals) brute_sharp += win.transform(4000.0 * (lam - c));
  CHECK(std::abs(sharp.value - brute_sharp) < 1e-10);
  CHECK(sharp.contributing < static_cast<long>(evals.size()));
}

TEST_CASE("sum-set trace equals the brute double loop") {
  std::mt19937_64 rng(555002);
  const std::vector<double> a = random_sorted(30, rng);
  const std::vector<double> b = random_sorted(40, rng);
  const WindowFunction win(0.3, 0.5, 6);
  const int p = 25;
  const double c = 0.9;

  const SmoothedTrace st = smoothed_trace_sumset(a, b, p, c, win);
  cplx brute = 0.0;
  for (double ai : a)
    for (double bj : b) brute += win.transform(p * (ai + bj - c));
  CHECK(std::abs(st.value - brute) < 1e-10);
}

TEST_CASE("weyl main term") {
  const WindowFunction win(0.0, 0.6, 8);  // g(0) = 1
  CHECK(weyl_main_term(0.3, win, 7, 2) == doctest::Approx(2.1).epsilon(1e-13));
  CHECK(weyl_main_term(0.3, win, 7, 1) == doctest::Approx(0.3).epsilon(1e-13));
  const WindowFunction off(1.0, 0.6, 8);  // t = 0 outside supp g
  CHECK(weyl_main_term(0.3, off, 7, 2) == 0.0);
}

TEST_CASE("separable spectra match per-factor assemblies") {
  const Hamiltonian f = Hamiltonian::preset("product:1,1.4142135623730951", 2);
  const ModelGeometry m2 = ModelGeometry::metaplectic(2);
  const int p = 12;

  const auto spectra = separable_spectra(f, m2, p);
  REQUIRE(spectra.size() == 2);
  REQUIRE(spectra[0].size() == static_cast<std::size_t>(p));
  for (int k = 0; k < p; ++k) {
    CHECK(spectra[0][k] == doctest::Approx((k + 0.5) / p).epsilon(1e-12));
    CHECK(spectra[1][k] ==
          doctest::Approx(std::sqrt(2.0) * (k + 0.5) / p).epsilon(1e-12));
  }

  // the sum-set trace over these equals the dense Kronecker-sum trace
  std::vector<double> dense;
  for (double ai : spectra[0])
    for (double bj : spectra[1]) dense.push_back(ai + bj);
  std::sort(dense.begin(), dense.end());
  const WindowFunction win(1.0606601717798212, 0.7, 8);
  const double c = 1.2;
  const SmoothedTrace s1 = smoothed_trace_sumset(spectra[0], spectra[1], p, c, win);
  const SmoothedTrace s2 = smoothed_trace(dense, p, c, win);
  CHECK(std::abs(s1.value - s2.value) < 1e-11);
}

TEST_CASE("orbit-sum model for the linear product at the reference window") {
  const double w2 = std::sqrt(2.0);
  const Hamiltonian f = Hamiltonian::preset("product:1,1.4142135623730951", 2);
  const double c = 1.2;
  const WindowFunction win(1.0606601717798212, 0.7, 8);

  const GutzwillerModel model = gutzwiller_model(f, c, win);
  REQUIRE(model.orbits.size() == 2);
  REQUIRE(model.terms.size() == 4);  // m = 1, 2 per circle

  for (const TraceTerm& term : model.terms) {
    const int m = term.repetition;
    CHECK(term.t_j == doctest::Approx(m / w2).epsilon(1e-9));
    // amplitude g(t_j) T / sqrt(det(I - P_m)), det = 4 sin^2(pi m / sqrt 2)
    const double det = 4.0 * std::pow(std::sin(kPi * m / w2), 2);
    const double want = win.value(m / w2) * (1.0 / w2) / std::sqrt(det);
    CHECK(term.amplitude == doctest::Approx(want).epsilon(1e-8));
  }
  // resonances of distinct circles carry distinct phases
  CHECK(std::abs(model.terms[0].action_mod1 - model.terms[2].action_mod1) > 1e-3);
}

TEST_CASE("oscillatory fit recovers synthetic coefficients") {
  std::vector<TraceTerm> terms(2);
  terms[0].action_mod1 = 0.13;
  terms[1].action_mod1 = 0.77;

  const std::vector<cplx> truth = {cplx(0.8, -0.3), cplx(0.05, 0.02),
                                   cplx(-0.4, 0.6), cplx(-0.01, 0.03)};
  std::vector<int> ps;
  for (int p = 50; p <= 200; p += 10) ps.push_back(p);
  std::vector<cplx> traces;
  for (int p : ps) {
    cplx v = 0.0;
    for (int j = 0; j < 2; ++j) {
      const cplx osc = std::exp(cplx(0.0, -kTwoPi * p * terms[j].action_mod1));
      v += osc * (truth[2 * j] + truth[2 * j + 1] / double(p));
    }
    traces.push_back(v);
  }

  const ExpansionFit fit = fit_trace_terms(ps, traces, terms, 1);
  REQUIRE(fit.coeff.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(fit.coeff[i] - truth[i]) < 1e-10);
  CHECK(fit.residual_rms < 1e-12);
  CHECK(fit.cond < 1e4);

  // degenerate design (identical phases) must be rejected, not silently fit
  std::vector<TraceTerm> same(2);
  same[0].action_mod1 = 0.25;
  same[1].action_mod1 = 0.25;
  CHECK_THROWS_AS(fit_trace_terms(ps, traces, same, 1), numeric_error);

  // too few rows for the requested expansion order
  const std::vector<int> ps2(ps.begin(), ps.begin() + 3);
  const std::vector<cplx> tr2(traces.begin(), traces.begin() + 3);
  CHECK_THROWS_AS(fit_trace_terms(ps2, tr2, terms, 3), config_error);
}

TEST_CASE("variational laplacian spectrum at small level") {
  // O(4): kernel of the shifted Bochner Laplacian is all of H^0, dim 5.
  // The trial family (enrichment 3) contains the first excited spherical
  // level exactly, so the Ritz gap reproduces the true eigenvalue
  // 4 pi (3 N/2 + 2) = 32 pi to quadrature rounding.
  const BochnerSpectrum bs = bochner_spectrum(4, 3);
  CHECK(bs.dim_hp == 5);
  CHECK(bs.zero_count == 5);
  CHECK(bs.spectral_gap >= kTwoPi * 4.0 * 0.999);
  CHECK(bs.spectral_gap ==
        doctest::Approx(4.0 * kPi * (3.0 * 4.0 / 2.0 + 2.0)).epsilon(1e-8));
}

TEST_CASE("mod1 edge cases") {
  CHECK(mod1(0.0) == 0.0);
  CHECK(mod1(1.0) == 0.0);
  CHECK(mod1(-0.25) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(mod1(7.25) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(mod1(-3.0) == 0.0);
}
