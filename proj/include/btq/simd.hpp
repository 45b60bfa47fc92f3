// SPDX-License-Identifier: MIT
//
// Small runtime-dispatched kernel set for the inner loops that dominate
// profiles: weighted complex reductions (quadrature inner products),
// uniform-grid Fourier sums (window transforms), and elementwise complex
// scaling (cocycle/basis column updates).
//
// Every kernel has a scalar reference implementation; vector backends must
// agree with it to ~1e-12 relative (they reorder FP reductions, so results
// are close but not bitwise equal). Backend is chosen once per process:
// AVX2+FMA when the CPU supports it, NEON on aarch64 builds, otherwise
// scalar. Set BTQ_SIMD=scalar|avx2|neon to override.

#pragma once

#include <complex>
#include <cstddef>

namespace btq::simd {

using cplx = std::complex<double>;

// sum_i w[i] * a[i] * conj(b[i])
cplx weighted_dot(const cplx* a, const cplx* b, const double* w, std::size_t n);

// sum_i g[i] * exp(-2 pi i freq (t0 + i dt)); the workhorse of window
// transforms. Implemented with a phase recurrence re-anchored from sincos
// every 256 steps, so it needs no vector transcendentals.
cplx fourier_sum(const double* g, std::size_t n, double t0, double dt, double freq);

// y[i] *= z[i]
void cmul_inplace(cplx* y, const cplx* z, std::size_t n);

// Name of the backend serving the calls above: "scalar", "avx2" or "neon".
const char* active_backend();

// Force a backend (tests, benchmarking). Throws btq::config_error if the
// requested backend is not available in this build/CPU.
void force_backend(const char* name);

namespace detail {
// Scalar reference implementations, always available (equivalence tests).
cplx weighted_dot_scalar(const cplx* a, const cplx* b, const double* w, std::size_t n);
cplx fourier_sum_scalar(const double* g, std::size_t n, double t0, double dt, double freq);
void cmul_inplace_scalar(cplx* y, const cplx* z, std::size_t n);

struct KernelTable {
  cplx (*weighted_dot)(const cplx*, const cplx*, const double*, std::size_t);
  cplx (*fourier_sum)(const double*, std::size_t, double, double, double);
  void (*cmul_inplace)(cplx*, const cplx*, std::size_t);
  const char* name;
};

bool avx2_available();
bool neon_available();
KernelTable scalar_table();
KernelTable avx2_table();  // valid only if avx2_available()
KernelTable neon_table();  // valid only if neon_available()
}  // namespace detail

}  // namespace btq::simd
