// SPDX-License-Identifier: MIT

#include "btq/window.hpp"

#include <cmath>
#include <cstdlib>

#include "btq/errors.hpp"

namespace btq {

namespace {

double int_pow(double x, int n) {
  double acc = 1.0;
  for (int i = 0; i < n; ++i) acc *= x;
  return acc;
}

// Binomial weights (-1)^j C(8, j) for barycentric interpolation on a
// uniform 9-point stencil.
constexpr double kBary[9] = {1, -8, 28, -56, 70, -56, 28, -8, 1};

}  // namespace

WindowFunction::WindowFunction(double center, double halfwidth, int nu)
    : c_(center), w_(halfwidth), nu_(nu) {
  if (!(halfwidth > 0.0)) throw config_error("window: halfwidth must be > 0");
  if (nu < 4 || nu > 64) throw config_error("window: nu must be in [4, 64]");
  de_ = 1.0 / (32.0 * w_);
  build_table();
}

double WindowFunction::value(double t) const {
  const double x = (t - c_) / w_;
  const double y = 1.0 - x * x;
  if (y <= 0.0) return 0.0;
  return int_pow(y, nu_);
}

cplx WindowFunction::phase(double e) const {
  return std::polar(1.0, -kTwoPi * c_ * e);
}

double WindowFunction::transform0(double e) const {
  // w * int_{-1}^{1} (1 - x^2)^nu cos(2 pi w e x) dx, endpoint terms vanish.
  const double freq = kTwoPi * w_ * std::abs(e);
  const int n = 256 + 32 * static_cast<int>(std::ceil(w_ * std::abs(e)));
  const double h = 2.0 / n;
  double acc = 0.0;
  for (int j = 1; j < n; ++j) {
    const double x = -1.0 + j * h;
    acc += int_pow(1.0 - x * x, nu_) * std::cos(freq * x);
  }
  return w_ * h * acc;
}

void WindowFunction::build_table() {
  table_.clear();
  int below = 0;
  for (std::size_t k = 0; k < 1u << 17; ++k) {
    const double v = transform0(double(k) * de_);
    table_.push_back(v);
    below = (std::abs(v) < 5e-16) ? below + 1 : 0;
    if (below >= 64) break;
  }
}

double WindowFunction::transform0_fast(double e) const {
  const double a = std::abs(e) / de_;
  if (a + 5.0 >= double(table_.size())) return 0.0;
  long k0 = std::lround(a);
  if (k0 < 0) k0 = 0;
  double num = 0.0, den = 0.0;
  for (int j = -4; j <= 4; ++j) {
    const long idx = k0 + j;
    const double d = a - double(idx);
    if (std::abs(d) < 1e-12) return table_[static_cast<std::size_t>(std::labs(idx))];
    const double bw = kBary[j + 4] / d;
    num += bw * table_[static_cast<std::size_t>(std::labs(idx))];
    den += bw;
  }
  return num / den;
}

double WindowFunction::envelope_cut(double tol) const {
  if (tol < 1e-14) throw config_error("window: envelope tolerance below table floor");
  for (std::size_t k = table_.size(); k-- > 0;) {
    if (std::abs(table_[k]) >= tol) return double(k + 2) * de_;
  }
  return de_;
}

double WindowFunction::mass() const {
  // int (1 - x^2)^nu dx = sqrt(pi) Gamma(nu+1)/Gamma(nu+3/2).
  return w_ * std::sqrt(kPi) *
         std::exp(std::lgamma(nu_ + 1.0) - std::lgamma(nu_ + 1.5));
}

}  // namespace btq
