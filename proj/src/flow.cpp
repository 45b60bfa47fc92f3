// SPDX-License-Identifier: MIT

#include "btq/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "btq/errors.hpp"

namespace btq {

namespace {

// Dormand-Prince 5(4) tableau (FSAL).
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = kB1 - 5179.0 / 57600, kE3 = kB3 - 7571.0 / 16695,
                 kE4 = kB4 - 393.0 / 640, kE5 = kB5 + 92097.0 / 339200,
                 kE6 = kB6 - 187.0 / 2100, kE7 = -1.0 / 40;

}  // namespace

FlowIntegrator::FlowIntegrator(const Hamiltonian& f, FlowOptions opt)
    : f_(&f), opt_(opt), s_(f.factors()) {}

std::size_t FlowIntegrator::dim_state() const {
  std::size_t n = 2 * static_cast<std::size_t>(s_);
  if (opt_.variational) n += 4 * static_cast<std::size_t>(s_) * static_cast<std::size_t>(s_);
  if (opt_.lift) n += 2 * static_cast<std::size_t>(s_);
  if (opt_.hol_lift) n += 2 * static_cast<std::size_t>(s_);
  return n;
}

FlowState FlowIntegrator::start(const Point& x0) const {
  FlowState st;
  st.x.resize(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) st.x[i] = canonical_chart(x0[i]);
  st.t = 0.0;
  st.f0 = f_->value(st.x);
  if (opt_.variational) st.tangent = Eigen::MatrixXd::Identity(2 * s_, 2 * s_);
  if (opt_.lift) st.lift_log.assign(static_cast<std::size_t>(s_), cplx(0.0, 0.0));
  if (opt_.hol_lift) st.hol_log.assign(static_cast<std::size_t>(s_), cplx(0.0, 0.0));
  return st;
}

void FlowIntegrator::pack(const FlowState& st, double* y) const {
  for (int i = 0; i < s_; ++i) {
    y[2 * i] = st.x[static_cast<std::size_t>(i)].zeta.real();
    y[2 * i + 1] = st.x[static_cast<std::size_t>(i)].zeta.imag();
  }
  std::size_t off = 2 * static_cast<std::size_t>(s_);
  if (opt_.variational) {
    for (int c = 0; c < 2 * s_; ++c)
      for (int r = 0; r < 2 * s_; ++r) y[off++] = st.tangent(r, c);
  }
  if (opt_.lift) {
    for (int i = 0; i < s_; ++i) {
      y[off++] = st.lift_log[static_cast<std::size_t>(i)].real();
      y[off++] = st.lift_log[static_cast<std::size_t>(i)].imag();
    }
  }
  if (opt_.hol_lift) {
    for (int i = 0; i < s_; ++i) {
      y[off++] = st.hol_log[static_cast<std::size_t>(i)].real();
      y[off++] = st.hol_log[static_cast<std::size_t>(i)].imag();
    }
  }
}

void FlowIntegrator::unpack(const double* y, FlowState& st) const {
  for (int i = 0; i < s_; ++i)
    st.x[static_cast<std::size_t>(i)].zeta = cplx(y[2 * i], y[2 * i + 1]);
  std::size_t off = 2 * static_cast<std::size_t>(s_);
  if (opt_.variational) {
    for (int c = 0; c < 2 * s_; ++c)
      for (int r = 0; r < 2 * s_; ++r) st.tangent(r, c) = y[off++];
  }
  if (opt_.lift) {
    for (int i = 0; i < s_; ++i) {
      st.lift_log[static_cast<std::size_t>(i)] = cplx(y[off], y[off + 1]);
      off += 2;
    }
  }
  if (opt_.hol_lift) {
    for (int i = 0; i < s_; ++i) {
      st.hol_log[static_cast<std::size_t>(i)] = cplx(y[off], y[off + 1]);
      off += 2;
    }
  }
}

void FlowIntegrator::rhs(const Point& charts, const double* y, double* dy) const {
  Point x(charts);
  for (int i = 0; i < s_; ++i)
    x[static_cast<std::size_t>(i)].zeta = cplx(y[2 * i], y[2 * i + 1]);
  const Jet2 jet = f_->jet(x);
  const std::vector<cplx> xi = Hamiltonian::xi_from_jet(jet, x);
  for (int i = 0; i < s_; ++i) {
    dy[2 * i] = xi[static_cast<std::size_t>(i)].real();
    dy[2 * i + 1] = xi[static_cast<std::size_t>(i)].imag();
  }
  std::size_t off = 2 * static_cast<std::size_t>(s_);
  if (opt_.variational) {
    const Eigen::MatrixXd jac = Hamiltonian::xi_jacobian_from_jet(jet, x);
    Eigen::Map<const Eigen::MatrixXd> m(y + off, 2 * s_, 2 * s_);
    Eigen::Map<Eigen::MatrixXd> dm(dy + off, 2 * s_, 2 * s_);
    dm = jac * m;
    off += 4 * static_cast<std::size_t>(s_) * static_cast<std::size_t>(s_);
  }
  if (opt_.lift) {
    for (int i = 0; i < s_; ++i) {
      const cplx z = x[static_cast<std::size_t>(i)].zeta;
      const cplx da = std::conj(z) * xi[static_cast<std::size_t>(i)] / (1.0 + std::norm(z));
      dy[off++] = da.real();
      dy[off++] = da.imag();
    }
  }
  if (opt_.hol_lift) {
    for (int i = 0; i < s_; ++i) {
      const cplx z = x[static_cast<std::size_t>(i)].zeta;
      const double q = 1.0 + std::norm(z);
      // d(xi^z)/dz = -2 pi i (2 q conj(z) f_zb + q^2 f_zzb).
      const cplx dh = cplx(0.0, -kTwoPi) *
                      (2.0 * q * std::conj(z) * jet.fzb[static_cast<std::size_t>(i)] +
                       q * q * jet.fzzb(i, i));
      dy[off++] = dh.real();
      dy[off++] = dh.imag();
    }
  }
}

void FlowIntegrator::apply_chart_switches(FlowState& st, double* y) const {
  bool switched = false;
  for (int i = 0; i < s_; ++i) {
    ChartPoint& xp = st.x[static_cast<std::size_t>(i)];
    if (std::abs(xp.zeta) <= kChartSwitchRadius) continue;
    const cplx old = xp.zeta;
    if (opt_.hol_lift)
      throw numeric_error("flow: chart switch with hol_lift active (path leaves the chart)");
    xp = flip_chart(xp);
    if (opt_.variational)
      st.tangent.middleRows(2 * i, 2) =
          chart_transition_jacobian(old) * st.tangent.middleRows(2 * i, 2);
    if (opt_.lift) st.lift_log[static_cast<std::size_t>(i)] -= std::log(old);
    switched = true;
  }
  if (switched) pack(st, y);
}

void FlowIntegrator::advance(FlowState& st, double t_target) const {
  const std::size_t nv = dim_state();
  Eigen::VectorXd y(nv), ytmp(nv), ynew(nv);
  Eigen::VectorXd k1(nv), k2(nv), k3(nv), k4(nv), k5(nv), k6(nv), k7(nv);
  pack(st, y.data());

  const double dir = (t_target >= st.t) ? 1.0 : -1.0;
  double h = dir * std::min(opt_.max_step, std::abs(t_target - st.t));
  if (h == 0.0) return;
  bool have_k1 = false;
  long nsteps = 0;

  const double t_eps = 1e-14 * std::max(1.0, std::abs(t_target));
  while (dir * (t_target - st.t) > t_eps) {
    if (++nsteps > opt_.max_steps) throw numeric_error("flow: step limit exceeded");
    h = dir * std::min({std::abs(h), opt_.max_step, std::abs(t_target - st.t)});

    if (!have_k1) rhs(st.x, y.data(), k1.data());
    ytmp = y + h * (kA21 * k1);
    rhs(st.x, ytmp.data(), k2.data());
    ytmp = y + h * (kA31 * k1 + kA32 * k2);
    rhs(st.x, ytmp.data(), k3.data());
    ytmp = y + h * (kA41 * k1 + kA42 * k2 + kA43 * k3);
    rhs(st.x, ytmp.data(), k4.data());
    ytmp = y + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
    rhs(st.x, ytmp.data(), k5.data());
    ytmp = y + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
    rhs(st.x, ytmp.data(), k6.data());
    ynew = y + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    rhs(st.x, ynew.data(), k7.data());

    double err2 = 0.0;
    bool bad = false;
    for (std::size_t i = 0; i < nv; ++i) {
      const double e = h * (kE1 * k1[static_cast<Eigen::Index>(i)] +
                            kE3 * k3[static_cast<Eigen::Index>(i)] +
                            kE4 * k4[static_cast<Eigen::Index>(i)] +
                            kE5 * k5[static_cast<Eigen::Index>(i)] +
                            kE6 * k6[static_cast<Eigen::Index>(i)] +
                            kE7 * k7[static_cast<Eigen::Index>(i)]);
      const double yn = ynew[static_cast<Eigen::Index>(i)];
      if (!std::isfinite(yn) || !std::isfinite(e)) {
        bad = true;
        break;
      }
      const double sc = opt_.atol +
                        opt_.rtol * std::max(std::abs(y[static_cast<Eigen::Index>(i)]),
                                             std::abs(yn));
      err2 += (e / sc) * (e / sc);
    }
    // Reject steps that run far past the chart overlap; the switch logic
    // handles |zeta| slightly above 1, not excursions toward the pole.
    for (int i = 0; i < s_ && !bad; ++i)
      if (std::hypot(ynew[2 * i], ynew[2 * i + 1]) > 4.0) bad = true;
    const double errnorm = bad ? 1e6 : std::sqrt(err2 / double(nv));

    if (errnorm <= 1.0) {
      st.t += h;
      y = ynew;
      unpack(y.data(), st);
      k1 = k7;
      have_k1 = true;
      // Chart switches invalidate the FSAL stage (representation changed).
      Eigen::VectorXd ysave = y;
      apply_chart_switches(st, y.data());
      if ((y - ysave).squaredNorm() != 0.0) have_k1 = false;
      const double grow = (errnorm == 0.0) ? 5.0
                                           : std::clamp(0.9 * std::pow(errnorm, -0.2), 0.2, 5.0);
      h *= grow;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(errnorm, -0.2));
      if (std::abs(h) < 1e-15) throw numeric_error("flow: step size underflow");
    }
  }
}

double FlowIntegrator::energy_drift(const FlowState& st) const {
  return f_->value(st.x) - st.f0;
}

FlowState flow_map(const Hamiltonian& f, const Point& x0, double t, FlowOptions opt) {
  FlowIntegrator integ(f, opt);
  FlowState st = integ.start(x0);
  integ.advance(st, t);
  return st;
}

}  // namespace btq
