// SPDX-License-Identifier: MIT
//
// Compactly supported smoothing windows for spectral sums:
//     g(t) = (1 - ((t - c)/w)^2)^nu   on [c - w, c + w],  0 outside.
// The transform ghat(E) = int g(t) e^{-2 pi i t E} dt factors as
// e^{-2 pi i c E} ghat0(E) with ghat0 real and even; ghat0 decays like
// E^{-(nu+1)} so a tolerance-based cutoff keeps spectral sums short.

#pragma once

#include <vector>

#include "btq/geometry.hpp"

namespace btq {

class WindowFunction {
 public:
  WindowFunction(double center, double halfwidth, int nu = 8);

  double center() const { return c_; }
  double halfwidth() const { return w_; }
  int nu() const { return nu_; }
  double support_lo() const { return c_ - w_; }
  double support_hi() const { return c_ + w_; }

  double value(double t) const;

  // Centered transform by adaptive trapezoid (endpoint derivatives vanish,
  // so uniform trapezoid converges superalgebraically).
  double transform0(double e) const;
  cplx transform(double e) const { return phase(e) * transform0(e); }

  // Table-backed fast path (9-point stencil on a 1/(32 w) grid, ~1e-12);
  // returns exactly 0 beyond the table.
  double transform0_fast(double e) const;
  cplx transform_fast(double e) const { return phase(e) * transform0_fast(e); }

  // Smallest cut with |ghat0(E)| < tol for all |E| >= cut, scanned from the
  // table (tol >= 1e-14).
  double envelope_cut(double tol) const;

  // int g dt, closed form (Beta function); oracle for transform0(0).
  double mass() const;

 private:
  double c_, w_;
  int nu_;
  double de_;                   // table spacing
  std::vector<double> table_;   // ghat0 on k * de_, k = 0..
  cplx phase(double e) const;
  void build_table();
};

}  // namespace btq
