// SPDX-License-Identifier: MIT

#include "btq/trace.hpp"

#include <algorithm>
#include <cmath>

namespace btq {

SmoothedTrace smoothed_trace(const std::vector<double>& evals, int p, double c,
                             const WindowFunction& win, double tol) {
  const double cut = win.envelope_cut(tol) / p;
  const auto lo = std::lower_bound(evals.begin(), evals.end(), c - cut);
  const auto hi = std::upper_bound(evals.begin(), evals.end(), c + cut);
  SmoothedTrace out;
  for (auto it = lo; it != hi; ++it) {
    out.value += win.transform_fast(p * (*it - c));
    ++out.contributing;
  }
  return out;
}

SmoothedTrace smoothed_trace_sumset(const std::vector<double>& a,
                                    const std::vector<double>& b, int p, double c,
                                    const WindowFunction& win, double tol) {
  const double cut = win.envelope_cut(tol) / p;
  SmoothedTrace out;
  for (double av : a) {
    const double target = c - av;
    const auto lo = std::lower_bound(b.begin(), b.end(), target - cut);
    const auto hi = std::upper_bound(b.begin(), b.end(), target + cut);
    for (auto it = lo; it != hi; ++it) {
      out.value += win.transform_fast(p * (av + *it - c));
      ++out.contributing;
    }
  }
  return out;
}

double weyl_main_term(double liouville_vol, const WindowFunction& win, int p,
                      int factors) {
  return std::pow(double(p), factors - 1) * win.value(0.0) * liouville_vol;
}

}  // namespace btq
