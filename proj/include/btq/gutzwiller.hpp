// SPDX-License-Identifier: MIT
//
// Orbit-sum predictions for smoothed traces and the oscillatory fit that
// extracts the coefficients from measured traces.
//
// For an isolated circle orbit with primitive period T and resonance m
// inside supp g, the leading metaplectic amplitude is
//     |b_0| = T / |det(I - P_m)|^{1/2},  det(I - P_m) = prod_j 4 sin^2(pi m w_j / w_i),
// and the trace contributes g(t_j) |b_0| e^{-2 pi i p lambda_j} + O(1/p).
// The fit solves complex least squares on columns e^{-2 pi i p lambda_j} p^{-r}.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "btq/geometry.hpp"
#include "btq/hamiltonian.hpp"
#include "btq/orbits.hpp"
#include "btq/window.hpp"

namespace btq {

struct TraceTerm {
  std::size_t orbit_index = 0;
  int repetition = 1;
  double t_j = 0.0;
  double action_mod1 = 0.0;  // of f - c, phase e^{-2 pi i p action}
  double amplitude = 0.0;    // predicted |coeff| of the p^0 column
  std::string tag;
};

struct GutzwillerModel {
  std::vector<OrbitRecord> orbits;
  std::vector<TraceTerm> terms;  // nondegenerate resonances in supp g
};

GutzwillerModel gutzwiller_model(const Hamiltonian& f, double c,
                                 const WindowFunction& win);

struct ExpansionFit {
  std::vector<cplx> coeff;  // terms.size() * (rmax+1), power index fastest
  int rmax = 1;
  double residual_rms = 0.0;
  double cond = 0.0;
};

// traces[i] is the measured smoothed trace at ps[i]. Throws numeric_error
// when the design matrix condition exceeds 1e10.
ExpansionFit fit_trace_terms(const std::vector<int>& ps,
                             const std::vector<cplx>& traces,
                             const std::vector<TraceTerm>& terms, int rmax);

// Per-factor Kostant-Souriau spectra (sorted) for separable Hamiltonians;
// the full spectrum is their sum-set.
std::vector<std::vector<double>> separable_spectra(const Hamiltonian& f,
                                                   const ModelGeometry& geom, int p);

}  // namespace btq
