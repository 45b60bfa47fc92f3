// SPDX-License-Identifier: MIT
//
// NEON backend (aarch64). Mirrors the scalar reference; only the reduction
// kernels are vectorized. The Fourier sum stays on the scalar path: its
// sequential rotor update is latency-bound and two-lane NEON shows no win.
// TODO: revisit the Fourier kernel with LD2 deinterleaving on hardware that
// can actually run it; this tree only builds the TU on aarch64.

#include "btq/simd.hpp"

#if defined(__ARM_NEON) && defined(__aarch64__)

#include <arm_neon.h>

namespace btq::simd::detail {

cplx weighted_dot_neon(const cplx* a, const cplx* b, const double* w,
                       std::size_t n) {
  const double* ap = reinterpret_cast<const double*>(a);
  const double* bp = reinterpret_cast<const double*>(b);
  float64x2_t racc = vdupq_n_f64(0.0);  // lanes: [w ar br, w ai bi]
  float64x2_t iacc = vdupq_n_f64(0.0);  // lanes: [w ar bi, w ai br]
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t va = vld1q_f64(ap + 2 * i);
    const float64x2_t vb = vld1q_f64(bp + 2 * i);
    const float64x2_t vw = vdupq_n_f64(w[i]);
    const float64x2_t vaw = vmulq_f64(va, vw);
    racc = vfmaq_f64(racc, vaw, vb);
    iacc = vfmaq_f64(iacc, vaw, vextq_f64(vb, vb, 1));
  }
  const double re = vaddvq_f64(racc);
  const double im = vgetq_lane_f64(iacc, 1) - vgetq_lane_f64(iacc, 0);
  return {re, im};
}

cplx fourier_sum_neon(const double* g, std::size_t n, double t0, double dt,
                      double freq) {
  return fourier_sum_scalar(g, n, t0, dt, freq);
}

void cmul_inplace_neon(cplx* y, const cplx* z, std::size_t n) {
  double* yp = reinterpret_cast<double*>(y);
  const double* zp = reinterpret_cast<const double*>(z);
  const float64x2_t sign = {-1.0, 1.0};
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t vy = vld1q_f64(yp + 2 * i);
    const float64x2_t vz = vld1q_f64(zp + 2 * i);
    const float64x2_t t1 = vmulq_laneq_f64(vy, vz, 0);               // zr*[yr,yi]
    const float64x2_t t2 = vmulq_laneq_f64(vextq_f64(vy, vy, 1), vz, 1);  // zi*[yi,yr]
    vst1q_f64(yp + 2 * i, vfmaq_f64(t1, t2, sign));
  }
}

bool neon_available() { return true; }

KernelTable neon_table() {
  return KernelTable{&weighted_dot_neon, &fourier_sum_neon, &cmul_inplace_neon,
                     "neon"};
}

}  // namespace btq::simd::detail

#else

namespace btq::simd::detail {
bool neon_available() { return false; }
KernelTable neon_table() { return scalar_table(); }
}  // namespace btq::simd::detail

#endif
