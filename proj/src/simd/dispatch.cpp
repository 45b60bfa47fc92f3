// SPDX-License-Identifier: MIT

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <string>

#include "btq/errors.hpp"
#include "btq/simd.hpp"

namespace btq::simd {

namespace {

detail::KernelTable g_table;  // guarded by g_once / force_backend
std::once_flag g_once;

detail::KernelTable pick_table(const char* request) {
  if (request != nullptr) {
    if (std::strcmp(request, "scalar") == 0) return detail::scalar_table();
    if (std::strcmp(request, "avx2") == 0) {
      if (!detail::avx2_available())
        throw config_error("simd backend 'avx2' not available on this CPU/build");
      return detail::avx2_table();
    }
    if (std::strcmp(request, "neon") == 0) {
      if (!detail::neon_available())
        throw config_error("simd backend 'neon' not available on this CPU/build");
      return detail::neon_table();
    }
    throw config_error(std::string("unknown simd backend '") + request + "'");
  }
  if (detail::avx2_available()) return detail::avx2_table();
  if (detail::neon_available()) return detail::neon_table();
  return detail::scalar_table();
}

void ensure_init() {
  std::call_once(g_once, [] { g_table = pick_table(std::getenv("BTQ_SIMD")); });
}

}  // namespace

cplx weighted_dot(const cplx* a, const cplx* b, const double* w, std::size_t n) {
  ensure_init();
  return g_table.weighted_dot(a, b, w, n);
}

cplx fourier_sum(const double* g, std::size_t n, double t0, double dt, double freq) {
  ensure_init();
  return g_table.fourier_sum(g, n, t0, dt, freq);
}

void cmul_inplace(cplx* y, const cplx* z, std::size_t n) {
  ensure_init();
  g_table.cmul_inplace(y, z, n);
}

const char* active_backend() {
  ensure_init();
  return g_table.name;
}

void force_backend(const char* name) {
  ensure_init();
  g_table = pick_table(name);
}

}  // namespace btq::simd
