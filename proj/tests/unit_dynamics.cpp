// SPDX-License-Identifier: MIT
//
// Unit tests for the classical layer: flow integration with variational and
// lift accumulators, periodic orbit location and actions, canonical frame
// transport, and quantum parallel transport. The height rotation
// z(t) = e^{-2 pi i t} z supplies exact references throughout; radial models
// pin the non-isometry paths via first-return identities.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "btq/errors.hpp"
#include "btq/flow.hpp"
#include "btq/frames.hpp"
#include "btq/geometry.hpp"
#include "btq/hamiltonian.hpp"
#include "btq/operators.hpp"
#include "btq/orbits.hpp"
#include "btq/transport.hpp"

using namespace btq;

namespace {

Point pt(cplx z, int chart = 0) { return Point{ChartPoint{z, chart}}; }

Point point_at_u(double u) { return pt(std::sqrt(u / (1.0 - u))); }

double u_of(const ChartPoint& x) {
  const double n = std::norm(x.zeta);
  return (x.chart == 0) ? n / (1.0 + n) : 1.0 / (1.0 + n);
}

}  // namespace

TEST_CASE("rotation flow is the explicit circle action") {
  const Hamiltonian rot = Hamiltonian::preset("rotation", 1);
  const FlowState st = flow_map(rot, pt(1.0), 0.25);
  // z(1/4) = e^{-i pi/2} = -i
  REQUIRE(st.x[0].chart == 0);
  CHECK(std::abs(st.x[0].zeta - cplx(0.0, -1.0)) < 1e-9);

  // backward in time reverses it
  const FlowState sb = flow_map(rot, pt(1.0), -0.25);
  CHECK(std::abs(sb.x[0].zeta - cplx(0.0, 1.0)) < 1e-9);
}

TEST_CASE("energy conservation and symplectic tangent") {
  const Hamiltonian f = Hamiltonian::preset("perturbed:0.4", 1);
  const Point x0 = pt(cplx(0.6, 0.2));

  FlowOptions opt;
  opt.variational = true;
  const FlowIntegrator integ(f, opt);
  FlowState st = integ.start(x0);
  integ.advance(st, 0.5);
  CHECK(std::abs(f.value(st.x) - f.value(x0)) < 1e-9);
  CHECK(integ.energy_drift(st) < 1e-9);

  // B^T Omega(y) B = Omega(x0): the tangent map is symplectic
  const Eigen::Matrix2d Ox = symplectic_matrix(x0[0]);
  const Eigen::Matrix2d Oy = symplectic_matrix(st.x[0]);
  const Eigen::MatrixXd B = st.tangent;
  CHECK((B.transpose() * Oy * B - Ox).norm() < 1e-8);
}

TEST_CASE("prequantum lift along the rotation") {
  const Hamiltonian rot = Hamiltonian::preset("rotation", 1);
  const double u = 0.3;

  FlowOptions opt;
  opt.lift = true;
  opt.hol_lift = true;
  const FlowState st = flow_map(rot, point_at_u(u), 1.0, opt);
  // closed after one period
  CHECK(close_points(st.x, point_at_u(u), 1e-8));
  // a = int z̄ dz/(1+|z|^2) = -2 pi i u t on the latitude circle
  CHECK(std::abs(st.lift_log[0] - cplx(0.0, -kTwoPi * u)) < 1e-9);
  // prequantum action t f + Im(a)/2pi = u - u = 0 for the height circle
  CHECK(mod1(st.t * st.f0 + st.lift_log[0].imag() / kTwoPi) ==
        doctest::Approx(0.0).epsilon(1e-9));
  // holomorphic-derivative log of e^{-2 pi i t} z is -2 pi i t
  const FlowState sh = flow_map(rot, point_at_u(u), 0.37, opt);
  CHECK(std::abs(sh.hol_log[0] - cplx(0.0, -kTwoPi * 0.37)) < 1e-9);
}

TEST_CASE("chart switches: transparent for the flow, fatal for hol_lift") {
  // f = Re z/(1+|z|^2): the level-0.1 set is the circle (x-5)^2+y^2 = 24,
  // which runs from |z| = 0.101 out to |z| = 9.9 and back.
  FactorPoly bump;
  bump.deg = 1;
  bump.c = Eigen::MatrixXcd::Zero(2, 2);
  bump.c(1, 0) = 0.5;
  bump.c(0, 1) = 0.5;
  ProductTerm t1;
  t1.factor.push_back(bump);
  const Hamiltonian f(1, {t1}, "bump");

  const double x_in = 5.0 - 2.0 * std::sqrt(6.0);  // = 0.10102..., level 0.1
  CHECK(f.value(pt(x_in)) == doctest::Approx(0.1).epsilon(1e-12));

  // a moment-map component generates a rigid rotation with period 1; the
  // half turn sends z to 1/z, so the far point |z| = 9.9 lives in chart 1
  // with zeta = x_in again
  const FlowState st = flow_map(f, pt(x_in), 0.5);
  CHECK(st.x[0].chart == 1);
  CHECK(std::abs(st.x[0].zeta - cplx(x_in, 0.0)) < 1e-7);
  CHECK(std::abs(f.value(st.x) - 0.1) < 1e-8);

  // two full periods close up back in chart 0
  const FlowState s2 = flow_map(f, pt(x_in), 2.0);
  CHECK(s2.x[0].chart == 0);
  CHECK(std::abs(s2.x[0].zeta - cplx(x_in, 0.0)) < 1e-6);

  FlowOptions opt;
  opt.hol_lift = true;
  CHECK_THROWS_AS(flow_map(f, pt(x_in), 2.0, opt), numeric_error);
}

TEST_CASE("single-factor level circles: period, action, volume") {
  // f = u + u^2/4 at c = 0.55: u* = -2 + sqrt(6.2), f'(u*) = sqrt(6.2)/2,
  // first-return period T = 1/f'(u*), action = mod1(T c - u*).
  const Hamiltonian f = Hamiltonian::preset("radial:0,1,0.25", 1);
  const double c = 0.55;
  const double ustar = -2.0 + std::sqrt(6.2);
  const double T = 2.0 / std::sqrt(6.2);

  const auto orbits = find_periodic_orbits(f, c);
  REQUIRE(orbits.size() == 1);
  CHECK(orbits[0].level == doctest::Approx(c).epsilon(1e-10));
  CHECK(orbits[0].primitive_period == doctest::Approx(T).epsilon(1e-7));
  CHECK(orbits[0].action_mod1 == doctest::Approx(mod1(T * c - ustar)).epsilon(1e-6));
  CHECK(u_of(orbits[0].x0[0]) == doctest::Approx(ustar).epsilon(1e-7));

  CHECK(liouville_volume(f, c) == doctest::Approx(T).epsilon(1e-7));

  const auto res = resonances_in(orbits, c, 0.3, 1.8);
  REQUIRE(res.size() == 2);  // m = 1, 2
  CHECK(res[0].repetition == 1);
  CHECK(res[0].t_j == doctest::Approx(T).epsilon(1e-7));
  CHECK(res[1].t_j == doctest::Approx(2.0 * T).epsilon(1e-7));
  CHECK(res[0].action_mod1 == doctest::Approx(mod1(-ustar)).epsilon(1e-6));
  CHECK(res[1].action_mod1 == doctest::Approx(mod1(-2.0 * ustar)).epsilon(1e-6));
  // a one-factor level circle is not transversally isolated
  CHECK(!res[0].nondegenerate);
  CHECK(res[0].stability_det == 0.0);

  // the perturbed model still has a closed level circle (non-radial path)
  const auto per = find_periodic_orbits(Hamiltonian::preset("perturbed", 1), 0.4);
  REQUIRE(per.size() == 1);
  CHECK(per[0].primitive_period > 0.5);
  CHECK(per[0].primitive_period < 2.0);
}

TEST_CASE("isolated circles of a linear product model") {
  const double w2 = std::sqrt(2.0);
  const Hamiltonian f = Hamiltonian::preset("product:1,1.4142135623730951", 2);
  const double c = 1.2;

  const auto orbits = find_periodic_orbits(f, c);
  REQUIRE(orbits.size() == 2);

  // both circles live in factor 1; factor 0 sits at u = 0 resp. u = 1
  int ia = -1, ib = -1;
  for (int i = 0; i < 2; ++i) {
    CHECK(orbits[i].circle_factor == 1);
    CHECK(std::abs(f.value(orbits[i].x0) - c) < 1e-9);
    CHECK(orbits[i].primitive_period == doctest::Approx(1.0 / w2).epsilon(1e-9));
    if (u_of(orbits[i].x0[0]) < 0.5) ia = i; else ib = i;
  }
  REQUIRE(ia != ib);
  REQUIRE(ia >= 0);
  REQUIRE(ib >= 0);

  // actions: T c - u2 per factor-1 holonomy; the u = 1 pole contributes
  // nothing extra in its own chart (compare on the circle, values may sit
  // on either side of the mod-1 wrap)
  auto circ_dist = [](double a, double b) {
    const double d = mod1(a - b);
    return std::min(d, 1.0 - d);
  };
  CHECK(circ_dist(orbits[ia].action_mod1, 0.0) < 1e-8);
  CHECK(circ_dist(orbits[ib].action_mod1, mod1(1.0 / w2)) < 1e-8);

  const auto res = resonances_in(orbits, c, 0.36, 1.76);
  REQUIRE(res.size() == 4);  // m = 1, 2 for each circle
  for (const auto& r : res) {
    CHECK(r.t_j == doctest::Approx(r.repetition / w2).epsilon(1e-9));
    CHECK(r.nondegenerate);
    const double want = 4.0 * std::pow(std::sin(kPi * r.repetition / w2), 2);
    CHECK(r.stability_det == doctest::Approx(want).epsilon(1e-8));
    const double base = (r.orbit_index == static_cast<std::size_t>(ia))
                            ? mod1(-r.repetition * c / w2)
                            : mod1(r.repetition * (1.0 - c) / w2);
    CHECK(circ_dist(r.action_mod1, base) < 1e-8);
  }

  // volume of {f = c}: interval-overlap formula vs numerical d/dc of the
  // sublevel area
  const double vol = liouville_volume(f, c);
  CHECK(vol == doctest::Approx(1.0 / w2).epsilon(1e-12));
  auto sublevel = [&](double cc) {
    const int n = 20001;
    double area = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u1 = (i + 0.5) / n;
      area += std::min(1.0, std::max(0.0, (cc - u1) / w2)) / n;
    }
    return area;
  };
  const double h = 1e-4;
  CHECK((sublevel(c + h) - sublevel(c - h)) / (2.0 * h) ==
        doctest::Approx(vol).epsilon(1e-5));
}

TEST_CASE("frame transport along isometry and radial flows") {
  const Hamiltonian rot = Hamiltonian::preset("rotation", 1);
  const double u = 0.3;
  const Point x = point_at_u(u);

  const FrameTransport ft = canonical_frame_transport(rot, x, 0.37);
  CHECK(std::abs(ft.d - 1.0) < 1e-8);
  CHECK(std::abs(ft.mu - 1.0) < 1e-8);
  CHECK(ft.residual < 1e-8);
  CHECK((ft.j_t - complex_structure_matrix()).norm() < 1e-8);

  // <Pi xi, xi> at t = 0 is |xi|^2/2 = 2 pi u (1-u)
  CHECK(std::abs(oblique_xi_pairing(rot, x, 0.0) - kTwoPi * u * (1.0 - u)) < 1e-8);

  // b^2 = 1/(2 pi u(1-u)), flow-invariant for the rotation
  const double want_b2 = 1.0 / (kTwoPi * u * (1.0 - u));
  CHECK(std::abs(kernel_b_squared(rot, x, 0.0) - want_b2) < 1e-7);
  CHECK(std::abs(kernel_b_squared(rot, x, 0.4) - want_b2) < 1e-6);

  CHECK(std::abs(kernel_a0_prediction(rot, x, 0.7) - 1.0) < 1e-8);

  // a radial (non-isometry) flow keeps the transport well-conditioned
  const Hamiltonian rad = Hamiltonian::preset("radial:0,1,0.25", 1);
  const FrameTransport fr = canonical_frame_transport(rad, x, 0.6);
  CHECK(fr.residual < 1e-6);
  CHECK(std::abs(fr.d) > 0.1);
  CHECK(std::abs(fr.d) < 10.0);
  // mu^2 = conj(D), branch tracked from +1
  CHECK(std::abs(fr.mu * fr.mu - std::conj(fr.d)) < 1e-8);

  // flat model kernel: normalized on the diagonal, gaussian off it
  const Eigen::Matrix2d J0 = complex_structure_matrix();
  const Eigen::Vector2d v(0.3, 0.4);
  CHECK(std::abs(local_kernel_model(J0, v, v) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(local_kernel_model(J0, v, Eigen::Vector2d::Zero())) -
                 std::exp(-kPi * v.squaredNorm() / 2.0)) < 1e-12);
}

TEST_CASE("quantum transport of the rotation is the exact phase twist") {
  const Hamiltonian rot = Hamiltonian::preset("rotation", 1);
  const ModelGeometry g1 = ModelGeometry::untwisted(1);
  const int p = 6;
  const double t = 0.3;

  const TransportResult tr = pullback_matrix(rot, g1, p, t);
  CHECK(tr.gram_cond < 1.0 + 1e-6);
  CHECK(tr.modulus_drift < 1e-8);
  CHECK(unitarity_defect(tr.op) < 1e-8);
  for (int k = 0; k <= p; ++k)
    for (int j = 0; j <= p; ++j) {
      const cplx want = (k == j) ? std::exp(cplx(0.0, kTwoPi * k * t)) : cplx(0.0);
      CHECK(std::abs(tr.op(k, j) - want) < 1e-8);
    }

  // group property of the exact-unitary case
  const TransportResult t2 = pullback_matrix(rot, g1, p, 0.2);
  const TransportResult t3 = pullback_matrix(rot, g1, p, 0.5);
  CHECK((tr.op * t2.op - t3.op).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("iterated transport converges to the kostant-souriau evolution") {
  const Hamiltonian f = Hamiltonian::preset("perturbed:0.3", 1);
  const ModelGeometry g1 = ModelGeometry::untwisted(1);
  const int p = 6;
  const double t = 0.2;

  const OperatorAssembler a(g1, f, p);
  const SpectralData sd = spectral_decompose(a.kostant_souriau());
  const Eigen::MatrixXcd target = evolution_operator(sd, p, t, +1);

  auto defect = [&](int steps) {
    TransportOptions opt;
    opt.steps = steps;
    const TransportResult tr = quantum_transport(f, g1, p, t, opt);
    return (tr.op - target).cwiseAbs().maxCoeff();
  };
  const double d250 = defect(250);
  const double d1000 = defect(1000);
  CHECK(d1000 < 0.6 * d250);  // first-order stepping: ratio ~ 1/4
  CHECK(d1000 < 1e-2);
}

TEST_CASE("half-form transport hits the metaplectic spectrum phases") {
  const Hamiltonian rot = Hamiltonian::preset("rotation", 1);
  const ModelGeometry m1 = ModelGeometry::metaplectic(1);
  const int p = 5;
  const double t = 0.2;

  // the rotation is an isometry flow, so the compression is exact: the
  // defect against diag e^{2 pi i t (k+1/2)} sits at rounding level at any
  // step count instead of decaying like 1/steps
  auto defect = [&](int steps) {
    TransportOptions opt;
    opt.steps = steps;
    opt.half_form = true;
    const TransportResult tr = quantum_transport(rot, m1, p, t, opt);
    double worst = 0.0;
    for (int k = 0; k < p; ++k)
      worst = std::max(worst,
                       std::abs(tr.op(k, k) - std::exp(cplx(0.0, kTwoPi * t * (k + 0.5)))));
    return worst;
  };
  CHECK(defect(1) < 1e-9);
  CHECK(defect(500) < 1e-9);
}

TEST_CASE("matrix powering") {
  Eigen::MatrixXcd m(2, 2);
  m << cplx(0.3, 0.1), cplx(-0.2, 0.4), cplx(0.0, -0.5), cplx(0.7, 0.0);
  const Eigen::MatrixXcd m5 = matrix_power(m, 5);
  CHECK((m5 - m * m * m * m * m).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((matrix_power(m, 0) - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK((matrix_power(m, 1) - m).cwiseAbs().maxCoeff() == 0.0);
}
