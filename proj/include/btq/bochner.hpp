// SPDX-License-Identifier: MIT
//
// Rayleigh-Ritz spectrum of the shifted Bochner Laplacian Delta^{E_p} - 2 pi n p
// on a single untwisted sphere factor. The trial family
//     s_{a,c} = z^a zbar^c (1+|z|^2)^{-K},  a <= p+K, c <= K,
// contains the holomorphic sections exactly, so the kernel of the shifted
// operator is reproduced to rounding while every other Ritz value bounds the
// true spectrum from above. A correct quantum space therefore shows exactly
// dim H_p near-zero modes followed by a gap of at least 2 pi n p.

#pragma once

#include <vector>

#include "btq/geometry.hpp"

namespace btq {

struct BochnerSpectrum {
  std::vector<double> shifted;  // Ritz values of Delta^{E_p} - 2 pi n p, ascending
  int zero_count = 0;           // values with |lambda| <= zero_tol
  double zero_tol = 0.0;
  double spectral_gap = 0.0;    // first Ritz value above zero_tol
  int dim_hp = 0;               // expected kernel dimension p+1
  int kept_modes = 0;           // trial functions surviving the Gram rank guard
};

// Assembles mass and covariant-stiffness forms of the trial family on a
// quadrature grid that integrates every matrix entry exactly, then solves the
// generalized eigenproblem by canonical orthogonalization. Only the single
// factor, untwisted model is supported; K controls the enrichment depth.
BochnerSpectrum bochner_spectrum(int p, int enrichment = 4);

}  // namespace btq
