// SPDX-License-Identifier: MIT
//
// Smoothed spectral sums Upsilon(p; c) = sum_k ghat(p(lambda_k - c)) and
// the Weyl main term p^{n-1} g(0) Vol_omega(f^{-1}(c)). The window cutoff
// keeps only eigenvalues with |lambda - c| <= E_cut/p, so sums stay short
// even for large spectra; for separable product models the sum over the
// two-factor sum-set spectrum walks sorted factor spectra directly.

#pragma once

#include <vector>

#include "btq/geometry.hpp"
#include "btq/window.hpp"

namespace btq {

struct SmoothedTrace {
  cplx value{0.0, 0.0};
  long contributing = 0;  // eigenvalues inside the window cutoff
};

// evals must be sorted ascending.
SmoothedTrace smoothed_trace(const std::vector<double>& evals, int p, double c,
                             const WindowFunction& win, double tol = 1e-13);

// Trace over the sum-set spectrum {a_i + b_j}; both inputs sorted ascending.
SmoothedTrace smoothed_trace_sumset(const std::vector<double>& a,
                                    const std::vector<double>& b, int p, double c,
                                    const WindowFunction& win, double tol = 1e-13);

double weyl_main_term(double liouville_vol, const WindowFunction& win, int p,
                      int factors);

}  // namespace btq
