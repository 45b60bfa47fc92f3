// SPDX-License-Identifier: MIT
//
// Hamiltonian flow with optional variational matrix and prequantum lift.
//
// The integrator is an adaptive Dormand-Prince 5(4) on the chart
// coordinates; charts flip with hysteresis once |zeta| > kChartSwitchRadius
// (an exact change of representation between accepted steps, not an
// integration event).
//
// Carried quantities:
//   * tangent:  d(phi_t) as a real 2s x 2s matrix from the initial point's
//     charts to the current active charts (rows transform under switches).
//   * lift_log: per factor, the unit-degree log of the line bundle
//     parallel transport along the flow line,
//         a_i(t) = int z̄_i dz_i/(1+|z_i|^2)  -  sum_switch Log zeta_leave,
//     so the O(N_i) transport coefficient from x(0) to x(t) is exp(N_i a_i)
//     (branch irrelevant: N_i is an integer). The full prequantum cocycle
//     of the lifted flow on sections of level p adds the energy rotation:
//         exp(2 pi i p t f(x0) + sum_i N_i a_i).
//   * the prequantum action of a closed orbit is t f(x0) + Im(sum a_i)/2pi
//     (mod 1), with phi^{L}_t acting as e^{2 pi i lambda} on the fiber.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "btq/geometry.hpp"
#include "btq/hamiltonian.hpp"

namespace btq {

struct FlowOptions {
  double rtol = 1e-11;
  double atol = 1e-12;
  double max_step = 0.05;
  bool variational = false;
  bool lift = false;
  // Accumulate per factor hol_log_i(t) = int d(xi^{z_i})/dz_i dt, the log of
  // the holomorphic derivative of the flow factor (exact when the flow is
  // holomorphic per factor, e.g. height rotations). Used for half-form
  // cocycles. Chart switches are not supported with this on.
  bool hol_lift = false;
  long max_steps = 4000000;
};

struct FlowState {
  Point x;
  double t = 0.0;
  double f0 = 0.0;             // energy at the start (conserved quantity)
  Eigen::MatrixXd tangent;     // 2s x 2s, valid if variational
  std::vector<cplx> lift_log;  // per factor, valid if lift
  std::vector<cplx> hol_log;   // per factor, valid if hol_lift
};

class FlowIntegrator {
 public:
  FlowIntegrator(const Hamiltonian& f, FlowOptions opt = {});

  FlowState start(const Point& x0) const;
  // Integrate st forward (or backward) until st.t == t_target.
  void advance(FlowState& st, double t_target) const;

  // Energy error accumulated so far (conservation diagnostic).
  double energy_drift(const FlowState& st) const;

  const FlowOptions& options() const { return opt_; }

 private:
  const Hamiltonian* f_;
  FlowOptions opt_;
  int s_;  // factor count

  std::size_t dim_state() const;
  void rhs(const Point& x, const double* y, double* dy) const;
  void apply_chart_switches(FlowState& st, double* y) const;
  void pack(const FlowState& st, double* y) const;
  void unpack(const double* y, FlowState& st) const;
};

// Convenience: flow x0 for time t (options decide what is carried along).
FlowState flow_map(const Hamiltonian& f, const Point& x0, double t,
                   FlowOptions opt = {});

}  // namespace btq
