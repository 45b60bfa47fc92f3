// SPDX-License-Identifier: MIT

#include "btq/gutzwiller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "btq/errors.hpp"
#include "btq/operators.hpp"

namespace btq {

GutzwillerModel gutzwiller_model(const Hamiltonian& f, double c,
                                 const WindowFunction& win) {
  GutzwillerModel model;
  model.orbits = find_periodic_orbits(f, c);
  const std::vector<Resonance> res =
      resonances_in(model.orbits, c, win.support_lo(), win.support_hi());
  for (const Resonance& r : res) {
    if (!r.nondegenerate) continue;
    if (std::abs(win.value(r.t_j)) <= 1e-12) continue;
    TraceTerm term;
    term.orbit_index = r.orbit_index;
    term.repetition = r.repetition;
    term.t_j = r.t_j;
    term.action_mod1 = r.action_mod1;
    term.amplitude = win.value(r.t_j) *
                     model.orbits[r.orbit_index].primitive_period /
                     std::sqrt(r.stability_det);
    term.tag = model.orbits[r.orbit_index].tag + "_m" + std::to_string(r.repetition);
    model.terms.push_back(term);
  }
  return model;
}

ExpansionFit fit_trace_terms(const std::vector<int>& ps,
                             const std::vector<cplx>& traces,
                             const std::vector<TraceTerm>& terms, int rmax) {
  if (ps.size() != traces.size()) throw config_error("fit: size mismatch");
  if (terms.empty()) throw config_error("fit: no terms");
  const Eigen::Index rows = static_cast<Eigen::Index>(ps.size());
  const Eigen::Index cols =
      static_cast<Eigen::Index>(terms.size()) * (rmax + 1);
  if (rows < 2 * cols)
    throw config_error("fit: need at least 2x more samples than coefficients");

  Eigen::MatrixXcd a(rows, cols);
  Eigen::VectorXcd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double p = ps[static_cast<std::size_t>(i)];
    b(i) = traces[static_cast<std::size_t>(i)];
    Eigen::Index col = 0;
    for (const TraceTerm& term : terms) {
      const cplx osc = std::polar(1.0, -kTwoPi * p * term.action_mod1);
      double scale = 1.0;
      for (int r = 0; r <= rmax; ++r) {
        a(i, col++) = osc * scale;
        scale /= p;
      }
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(cols - 1);
  ExpansionFit fit;
  fit.rmax = rmax;
  fit.cond = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
  if (fit.cond > 1e10)
    throw numeric_error("fit: oscillatory design matrix is ill-conditioned");
  const Eigen::VectorXcd x = svd.solve(b);
  fit.coeff.assign(x.data(), x.data() + x.size());
  fit.residual_rms = (a * x - b).norm() / std::sqrt(double(rows));
  return fit;
}

std::vector<std::vector<double>> separable_spectra(const Hamiltonian& f,
                                                   const ModelGeometry& geom, int p) {
  const auto parts = f.separable_parts();
  if (!parts) throw config_error("separable_spectra: Hamiltonian is not separable");
  if (static_cast<int>(parts->size()) != geom.factors)
    throw config_error("separable_spectra: factor mismatch");
  std::vector<std::vector<double>> out;
  for (int i = 0; i < geom.factors; ++i) {
    ModelGeometry g1;
    g1.factors = 1;
    g1.twist = {geom.twist[static_cast<std::size_t>(i)]};
    OperatorAssembler assembler(g1, (*parts)[static_cast<std::size_t>(i)], p);
    const SpectralData sd = spectral_decompose(assembler.kostant_souriau());
    std::vector<double> evals(sd.evals.data(), sd.evals.data() + sd.evals.size());
    std::sort(evals.begin(), evals.end());
    out.push_back(std::move(evals));
  }
  return out;
}

}  // namespace btq
