// SPDX-License-Identifier: MIT
//
// Named verification checks with pinned tolerances. Each check compares a
// measured quantity against an independent prediction (closed form, exact
// oracle, or convergence-order bound) and reports one row per assertion;
// the CLI `check` verb and the acceptance runner both consume these.

#pragma once

#include <string>
#include <vector>

#include "btq/geometry.hpp"
#include "btq/hamiltonian.hpp"

namespace btq {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double predicted = 0.0;
  double rel_err = 0.0;  // the quantity compared against tolerance
  double tolerance = 0.0;
  bool pass = false;
};

struct CheckReport {
  std::string criterion;    // short slug, stable across runs
  std::string description;  // one line
  bool blocking = true;     // stretch checks report but do not gate
  std::vector<CheckResult> results;
  bool pass() const;
};

// Quantum space dimensions: p+1 / p / (p+1)^2 for p = 1..64, exact.
CheckReport check_dimensions();
// Height-model Kostant-Souriau spectra {k/p} and {(k+1/2)/p}, p in {8,32,128}.
CheckReport check_exact_spectra();
// Iterated pullback converges to the flow-aligned propagator with order >= 0.9.
CheckReport check_transport_order();
// Smoothed spectral sum equals the closed Poisson-summation form to 1e-8.
CheckReport check_poisson_summation();
// Weyl term: p |Tr - g(0) Vol| stable to 20% across the p grid.
CheckReport check_weyl_term();
// Fitted isolated-orbit amplitudes match T / (2 |sin(pi m w1/w2)|) to 5%.
CheckReport check_orbit_amplitudes();
// Kernel leading coefficient: a0 = 1 (rotation), a0^2 against the frame
// determinant after Richardson extrapolation (radial), b0^2 = 2/|xi|^2.
CheckReport check_leading_coefficient();
// Propagator off-graph decay and energy-window kernel decay, exponent < -3;
// coherent states propagate along the flow with <= 1% stray mass.
CheckReport check_kernel_decay();
// Hermiticity / unitarity / group law / trace routes / classical invariants.
CheckReport check_invariants();
// Shifted Bochner Laplacian: dim H_p zero modes, gap >= 2 pi n p (stretch).
CheckReport check_bochner_gap();

// Flow-aligned kernel value at (phi_t x, x) normalized by the Bergman
// diagonal and the prequantum transport coefficient; tends to a_0 + O(1/p).
cplx a0_check(const Hamiltonian& f, const ModelGeometry& geom, int p, double t,
              const Point& x);

// Windowed-kernel normalization at t = 0: b_0^2 against 2/|xi_f|_g^2.
CheckResult b_kernel_check(const Hamiltonian& f, const Point& x);

// Propagated coherent state: grid argmax within 3 p^{-1/2} of phi_t(x0) and
// mass fraction outside the p^{-1/2} log p ball at most 1%.
std::vector<CheckResult> coherent_propagation_check(const Hamiltonian& f,
                                                    const ModelGeometry& geom, int p,
                                                    double t, const Point& x0);

// Registry in canonical order (the stretch check last).
std::vector<std::string> check_names();
CheckReport run_check(const std::string& name);

}  // namespace btq
