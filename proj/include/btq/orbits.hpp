// SPDX-License-Identifier: MIT
//
// Periodic orbits of the classical flow at a fixed level, their prequantum
// actions, and the resonance data entering trace predictions.
//
// Two families are supported:
//  * single factor: the level circle of f through {f = c} (level sets of a
//    one-factor Hamiltonian are circles); located by a ray scan and a
//    first-return search, so it works for non-radial perturbations too.
//  * separable linear products f = sum w_i u_i: the isolated circles where
//    one factor moves and every other factor sits at a pole. These are the
//    orbits whose repetitions carry the trace-formula amplitudes
//    T / sqrt(det(I - P_m)), det(I - P_m) = prod_j 4 sin^2(pi m w_j / w_i).
//
// Every record, including the analytic ones, is validated by integrating
// the lifted flow over one period: closure to 1e-8 and the action
//     lambda = T f(x0) + Im(sum_i a_i)/(2 pi)  (mod 1)
// from the holonomy accumulators.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "btq/hamiltonian.hpp"

namespace btq {

struct OrbitRecord {
  Point x0;
  double level = 0.0;
  double primitive_period = 0.0;
  double action_mod1 = 0.0;   // prequantum action of f over one period
  int circle_factor = -1;     // moving factor for product circles, else -1
  std::vector<double> transverse_angles;  // return-map angles per other factor
  std::string tag;
};

struct Resonance {
  std::size_t orbit_index = 0;
  int repetition = 1;
  double t_j = 0.0;
  double action_mod1 = 0.0;   // action of f - c over t_j, mod 1
  double stability_det = 0.0; // det(I - P_m); 0 for non-isolated circles
  bool nondegenerate = false;
};

std::vector<OrbitRecord> find_periodic_orbits(const Hamiltonian& f, double c);

// Repetitions with t_j = m T in [t_lo, t_hi], m >= 1.
std::vector<Resonance> resonances_in(const std::vector<OrbitRecord>& orbits,
                                     double c, double t_lo, double t_hi);

// Liouville volume of {f = c} against omega^n/n!:
//  * one factor: equals the primitive period of the level circle;
//  * two-factor separable linear products: exact interval-overlap formula.
double liouville_volume(const Hamiltonian& f, double c);

double mod1(double x);

}  // namespace btq
