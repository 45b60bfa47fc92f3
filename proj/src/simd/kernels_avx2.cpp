// SPDX-License-Identifier: MIT
//
// AVX2+FMA backend. Compiled with per-function target attributes so the
// translation unit builds on any x86-64 toolchain; dispatch.cpp only calls
// in here after a CPUID check.

#include "btq/simd.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

#include "btq/geometry.hpp"

namespace btq::simd::detail {

namespace {

__attribute__((target("avx2,fma"))) inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// Sum of even lanes and of odd lanes separately: returns {e0+e2, o1+o3}.
__attribute__((target("avx2,fma"))) inline void hsum_eo(__m256d v, double* even,
                                                        double* odd) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);  // {e0+e2, o1+o3}
  *even = _mm_cvtsd_f64(s);
  *odd = _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

}  // namespace

__attribute__((target("avx2,fma")))
cplx weighted_dot_avx2(const cplx* a, const cplx* b, const double* w,
                       std::size_t n) {
  const double* ap = reinterpret_cast<const double*>(a);
  const double* bp = reinterpret_cast<const double*>(b);
  __m256d accA0 = _mm256_setzero_pd(), accB0 = _mm256_setzero_pd();
  __m256d accA1 = _mm256_setzero_pd(), accB1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // First pair of complexes.
    __m256d va = _mm256_loadu_pd(ap + 2 * i);
    __m256d vb = _mm256_loadu_pd(bp + 2 * i);
    __m128d wp = _mm_loadu_pd(w + i);
    __m256d vw = _mm256_permute4x64_pd(_mm256_castpd128_pd256(wp), 0x50);
    __m256d vaw = _mm256_mul_pd(va, vw);
    accA0 = _mm256_fmadd_pd(vaw, vb, accA0);
    accB0 = _mm256_fmadd_pd(vaw, _mm256_permute_pd(vb, 0x5), accB0);
    // Second pair.
    va = _mm256_loadu_pd(ap + 2 * i + 4);
    vb = _mm256_loadu_pd(bp + 2 * i + 4);
    wp = _mm_loadu_pd(w + i + 2);
    vw = _mm256_permute4x64_pd(_mm256_castpd128_pd256(wp), 0x50);
    vaw = _mm256_mul_pd(va, vw);
    accA1 = _mm256_fmadd_pd(vaw, vb, accA1);
    accB1 = _mm256_fmadd_pd(vaw, _mm256_permute_pd(vb, 0x5), accB1);
  }
  double re = hsum(_mm256_add_pd(accA0, accA1));
  double even, odd;
  hsum_eo(_mm256_add_pd(accB0, accB1), &even, &odd);
  double im = odd - even;  // ai*br - ar*bi
  for (; i < n; ++i) {
    re += w[i] * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
    im += w[i] * (a[i].imag() * b[i].real() - a[i].real() * b[i].imag());
  }
  return {re, im};
}

__attribute__((target("avx2,fma")))
cplx fourier_sum_avx2(const double* g, std::size_t n, double t0, double dt,
                      double freq) {
  // Four interleaved phase streams (stride 4), two complexes per register.
  constexpr std::size_t kRefresh = 256;  // outer iterations between re-anchors
  const double dphi = -kTwoPi * freq * dt;
  const cplx step4 = std::polar(1.0, 4.0 * dphi);
  const __m256d vstep_re = _mm256_set1_pd(step4.real());
  const __m256d vstep_im = _mm256_set1_pd(step4.imag());
  __m256d acc01 = _mm256_setzero_pd(), acc23 = _mm256_setzero_pd();

  std::size_t i = 0;
  while (i + 4 <= n) {
    // Re-anchor the four rotors exactly.
    const double base = -kTwoPi * freq * t0;
    alignas(32) double r01[4], r23[4];
    for (int jdx = 0; jdx < 4; ++jdx) {
      const cplx r = std::polar(1.0, base + dphi * double(i + std::size_t(jdx)));
      (jdx < 2 ? r01 : r23)[2 * (jdx & 1)] = r.real();
      (jdx < 2 ? r01 : r23)[2 * (jdx & 1) + 1] = r.imag();
    }
    __m256d rot01 = _mm256_load_pd(r01);
    __m256d rot23 = _mm256_load_pd(r23);

    std::size_t iters = std::min(kRefresh, (n - i) / 4);
    for (std::size_t k = 0; k < iters; ++k, i += 4) {
      const __m256d gv = _mm256_loadu_pd(g + i);
      const __m256d g01 = _mm256_permute4x64_pd(gv, 0x50);  // g0 g0 g1 g1
      const __m256d g23 = _mm256_permute4x64_pd(gv, 0xFA);  // g2 g2 g3 g3
      acc01 = _mm256_fmadd_pd(g01, rot01, acc01);
      acc23 = _mm256_fmadd_pd(g23, rot23, acc23);
      // rot *= step4 (complex multiply via addsub).
      __m256d t1 = _mm256_mul_pd(rot01, vstep_re);
      __m256d t2 = _mm256_mul_pd(_mm256_permute_pd(rot01, 0x5), vstep_im);
      rot01 = _mm256_addsub_pd(t1, t2);
      t1 = _mm256_mul_pd(rot23, vstep_re);
      t2 = _mm256_mul_pd(_mm256_permute_pd(rot23, 0x5), vstep_im);
      rot23 = _mm256_addsub_pd(t1, t2);
    }
  }
  __m256d acc = _mm256_add_pd(acc01, acc23);
  double even, odd;
  hsum_eo(acc, &even, &odd);
  cplx out(even, odd);
  // Scalar tail.
  for (; i < n; ++i)
    out += g[i] * std::polar(1.0, -kTwoPi * freq * (t0 + double(i) * dt));
  return out;
}

__attribute__((target("avx2,fma")))
void cmul_inplace_avx2(cplx* y, const cplx* z, std::size_t n) {
  double* yp = reinterpret_cast<double*>(y);
  const double* zp = reinterpret_cast<const double*>(z);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vy = _mm256_loadu_pd(yp + 2 * i);
    const __m256d vz = _mm256_loadu_pd(zp + 2 * i);
    const __m256d zre = _mm256_movedup_pd(vz);
    const __m256d zim = _mm256_permute_pd(vz, 0xF);
    const __m256d t1 = _mm256_mul_pd(vy, zre);
    const __m256d t2 = _mm256_mul_pd(_mm256_permute_pd(vy, 0x5), zim);
    _mm256_storeu_pd(yp + 2 * i, _mm256_addsub_pd(t1, t2));
  }
  for (; i < n; ++i) y[i] *= z[i];
}

bool avx2_available() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

KernelTable avx2_table() {
  return KernelTable{&weighted_dot_avx2, &fourier_sum_avx2, &cmul_inplace_avx2,
                     "avx2"};
}

}  // namespace btq::simd::detail

#else  // non-x86 build

namespace btq::simd::detail {
bool avx2_available() { return false; }
KernelTable avx2_table() { return scalar_table(); }
}  // namespace btq::simd::detail

#endif
