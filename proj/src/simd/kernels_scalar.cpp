// SPDX-License-Identifier: MIT

#include <cmath>

#include "btq/geometry.hpp"
#include "btq/simd.hpp"

namespace btq::simd::detail {

cplx weighted_dot_scalar(const cplx* a, const cplx* b, const double* w,
                         std::size_t n) {
  // Two independent accumulators; pairs with the vector backends' blocking
  // closely enough that differences stay at rounding level.
  double re0 = 0.0, im0 = 0.0, re1 = 0.0, im1 = 0.0;
  std::size_t i = 0;
  for (; i + 1 < n; i += 2) {
    const cplx &x0 = a[i], &y0 = b[i];
    const cplx &x1 = a[i + 1], &y1 = b[i + 1];
    re0 += w[i] * (x0.real() * y0.real() + x0.imag() * y0.imag());
    im0 += w[i] * (x0.imag() * y0.real() - x0.real() * y0.imag());
    re1 += w[i + 1] * (x1.real() * y1.real() + x1.imag() * y1.imag());
    im1 += w[i + 1] * (x1.imag() * y1.real() - x1.real() * y1.imag());
  }
  if (i < n) {
    re0 += w[i] * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
    im0 += w[i] * (a[i].imag() * b[i].real() - a[i].real() * b[i].imag());
  }
  return {re0 + re1, im0 + im1};
}

cplx fourier_sum_scalar(const double* g, std::size_t n, double t0, double dt,
                        double freq) {
  // Phase recurrence with periodic exact re-anchoring. The rotor picks up
  // O(k eps) relative drift over k steps, so a 256-step refresh keeps the
  // whole sum near machine precision.
  constexpr std::size_t kRefresh = 256;
  cplx acc = 0.0;
  const cplx step = std::polar(1.0, -kTwoPi * freq * dt);
  for (std::size_t block = 0; block < n; block += kRefresh) {
    const std::size_t end = std::min(n, block + kRefresh);
    cplx rot = std::polar(1.0, -kTwoPi * freq * (t0 + double(block) * dt));
    for (std::size_t i = block; i < end; ++i) {
      acc += g[i] * rot;
      rot *= step;
    }
  }
  return acc;
}

void cmul_inplace_scalar(cplx* y, const cplx* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] *= z[i];
}

KernelTable scalar_table() {
  return KernelTable{&weighted_dot_scalar, &fourier_sum_scalar,
                     &cmul_inplace_scalar, "scalar"};
}

}  // namespace btq::simd::detail
