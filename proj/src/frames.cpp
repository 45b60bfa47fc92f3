// SPDX-License-Identifier: MIT

#include "btq/frames.hpp"

#include <cmath>

#include "btq/errors.hpp"

namespace btq {

namespace {

using Mat2 = Eigen::Matrix2d;
using Mat2c = Eigen::Matrix2cd;
using Vec2c = Eigen::Vector2cd;

// Oblique projector onto T^{1,0}_0 along the (0,1) space of j (bilinear
// annihilator construction; n = 1).
Mat2c oblique_projector(const Mat2& j) {
  const Vec2c w0(cplx(1.0, 0.0), cplx(0.0, -1.0));
  const Mat2c jc = j.cast<cplx>();
  const Mat2c anti = Mat2c::Identity() + cplx(0.0, 1.0) * jc;
  Vec2c k = anti.col(0);
  if (anti.col(1).norm() > k.norm()) k = anti.col(1);
  const Vec2c ell(-k(1), k(0));  // ell^T k = 0 (bilinear)
  const cplx denom = ell(0) * w0(0) + ell(1) * w0(1);
  if (std::abs(denom) < 1e-12)
    throw numeric_error("frame transport: degenerate subspace pairing");
  return (w0 * ell.transpose()) / denom;
}

struct OdeState {
  Eigen::Vector2d y;
  Mat2 b;
  Vec2c w;
};

struct FrameOde {
  const Hamiltonian* f;
  Mat2 omega0;  // Omega-hat at the base point (constant coefficients)
  Mat2 j0;

  OdeState deriv(const OdeState& s) const {
    Point y(1);
    y[0] = ChartPoint{cplx(s.y(0), s.y(1)), 0};
    if (std::abs(y[0].zeta) > 3.0)
      throw numeric_error("frame transport: trajectory left the chart");
    const Jet2 jet = f->jet(y);
    const std::vector<cplx> xi = Hamiltonian::xi_from_jet(jet, y);
    const Mat2 dxi = Hamiltonian::xi_jacobian_from_jet(jet, y);

    OdeState d;
    d.y = Eigen::Vector2d(-xi[0].real(), -xi[0].imag());
    d.b = -dxi * s.b;
    // J' = [J, B^{-1} B'] and G' = Omega J' with J = B^{-1} J0 B.
    const Mat2 binv = s.b.inverse();
    const Mat2 m = -binv * dxi * s.b;
    const Mat2 j = binv * j0 * s.b;
    const Mat2 jdot = j * m - m * j;
    const Mat2 g = omega0 * j;
    const Mat2 gdot = omega0 * jdot;
    const Mat2c pj = 0.5 * (Mat2::Identity().cast<cplx>() -
                            cplx(0.0, 1.0) * j.cast<cplx>());
    const Mat2c pjdot = cplx(0.0, -0.5) * jdot.cast<cplx>();
    d.w = pjdot * s.w - pj * (0.5 * (g.inverse() * gdot).cast<cplx>()) * s.w;
    return d;
  }
};

}  // namespace

FrameTransport canonical_frame_transport(const Hamiltonian& f, const Point& x,
                                         double t, int steps) {
  if (f.factors() != 1)
    throw config_error("canonical_frame_transport: single factor only");
  if (x.size() != 1) throw config_error("canonical_frame_transport: bad point");
  if (steps < 1) throw config_error("canonical_frame_transport: steps >= 1");
  const ChartPoint xc = canonical_chart(x[0]);

  FrameOde ode;
  ode.f = &f;
  ode.j0 = complex_structure_matrix();
  ode.omega0 = symplectic_matrix(xc);

  OdeState s;
  s.y = Eigen::Vector2d(xc.zeta.real(), xc.zeta.imag());
  s.b = Mat2::Identity();
  s.w = Vec2c(cplx(1.0, 0.0), cplx(0.0, -1.0));

  const Vec2c w0 = s.w;
  const Vec2c w0bar = s.w.conjugate();
  const Mat2c g0 = (ode.omega0 * ode.j0).cast<cplx>();
  const cplx num = (w0.transpose() * g0 * w0bar).value();  // = 2 rho(x)

  cplx sqrt_d(1.0, 0.0);
  const double h = t / steps;
  for (int k = 0; k < steps; ++k) {
    const OdeState k1 = ode.deriv(s);
    OdeState s2{s.y + 0.5 * h * k1.y, s.b + 0.5 * h * k1.b, s.w + 0.5 * h * k1.w};
    const OdeState k2 = ode.deriv(s2);
    OdeState s3{s.y + 0.5 * h * k2.y, s.b + 0.5 * h * k2.b, s.w + 0.5 * h * k2.w};
    const OdeState k3 = ode.deriv(s3);
    OdeState s4{s.y + h * k3.y, s.b + h * k3.b, s.w + h * k3.w};
    const OdeState k4 = ode.deriv(s4);
    s.y += (h / 6.0) * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
    s.b += (h / 6.0) * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b);
    s.w += (h / 6.0) * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);

    // Track the square-root branch continuously along the path.
    const Mat2 j = s.b.inverse() * ode.j0 * s.b;
    const Mat2c pbar = Mat2c::Identity() - oblique_projector(j);
    const cplx den =
        (s.w.transpose() * (ode.omega0 * j).cast<cplx>() * (pbar * w0bar)).value();
    if (std::abs(den) < 1e-14)
      throw numeric_error("frame transport: degenerate determinant");
    const cplx dval = num / den;
    cplx root = std::sqrt(dval);
    if (std::abs(root - sqrt_d) > std::abs(root + sqrt_d)) root = -root;
    sqrt_d = root;
  }

  FrameTransport out;
  out.j_t = s.b.inverse() * ode.j0 * s.b;
  out.w = s.w;
  out.d = sqrt_d * sqrt_d;
  out.mu = std::conj(sqrt_d);
  const Vec2c eig = out.j_t.cast<cplx>() * s.w - cplx(0.0, 1.0) * s.w;
  out.residual = eig.cwiseAbs().maxCoeff();
  return out;
}

cplx oblique_xi_pairing(const Hamiltonian& f, const Point& x, double t, int steps) {
  const FrameTransport ft = canonical_frame_transport(f, x, t, steps);
  const ChartPoint xc = canonical_chart(x[0]);
  Point xp(1);
  xp[0] = xc;
  const std::vector<cplx> xi = f.xi(xp);
  const Vec2c v(cplx(xi[0].real(), 0.0), cplx(xi[0].imag(), 0.0));
  const Mat2c g0 = (symplectic_matrix(xc) * complex_structure_matrix()).cast<cplx>();
  const Mat2c proj = oblique_projector(ft.j_t);
  return ((proj * v).transpose() * g0 * v).value();
}

cplx kernel_b_squared(const Hamiltonian& f, const Point& x, double t, int steps) {
  const FrameTransport ft = canonical_frame_transport(f, x, t, steps);
  const cplx pairing = oblique_xi_pairing(f, x, t, steps);
  if (std::abs(pairing) < 1e-14)
    throw numeric_error("kernel_b_squared: degenerate pairing (fixed point?)");
  return 1.0 / (ft.d * pairing);
}

cplx kernel_a0_prediction(const Hamiltonian& f, const Point& x, double t, int steps) {
  const FrameTransport ft = canonical_frame_transport(f, x, -t, steps);
  return 1.0 / std::conj(ft.mu);  // = D(-t)^{-1/2}, transported branch
}

cplx local_kernel_model(const Eigen::Matrix2d& j, const Eigen::Vector2d& z,
                        const Eigen::Vector2d& zp) {
  const Mat2c proj = oblique_projector(j);
  Mat2 omega;
  omega << 0.0, 1.0, -1.0, 0.0;
  const Mat2c g = (omega * j).cast<cplx>();
  const Vec2c dz = (z - zp).cast<cplx>();
  const cplx quad = ((proj * dz).transpose() * g * dz).value();
  const double sym = (z.transpose() * omega * zp).value();
  return std::exp(-kPi * (quad + cplx(0.0, sym)));
}

}  // namespace btq
