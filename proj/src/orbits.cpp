// SPDX-License-Identifier: MIT

#include "btq/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "btq/errors.hpp"
#include "btq/flow.hpp"

namespace btq {

namespace {

struct LinearPart {
  double weight = 0.0;  // coefficient of u_i
  double offset = 0.0;
};

// f_i = offset + weight * u for a single-factor Hamiltonian, if it has
// that form (degree <= 1 with no angular dependence).
std::optional<LinearPart> linear_height_part(const Hamiltonian& f) {
  if (f.factors() != 1) return std::nullopt;
  cplx c00(0.0, 0.0), c11(0.0, 0.0);
  for (const ProductTerm& term : f.terms()) {
    const FactorPoly& fp = term.factor[0];
    if (fp.deg > 1) return std::nullopt;
    if (fp.deg == 0) {
      c00 += fp.c(0, 0);
      c11 += fp.c(0, 0);  // constants promote: c (1+u-part) keeps both diag
      continue;
    }
    if (std::abs(fp.c(0, 1)) > 1e-12 || std::abs(fp.c(1, 0)) > 1e-12)
      return std::nullopt;
    c00 += fp.c(0, 0);
    c11 += fp.c(1, 1);
  }
  if (std::abs(c00.imag()) > 1e-12 || std::abs(c11.imag()) > 1e-12)
    return std::nullopt;
  LinearPart out;
  out.offset = c00.real();
  out.weight = c11.real() - c00.real();
  return out;
}

std::optional<std::vector<LinearPart>> linear_height_parts(const Hamiltonian& f) {
  const auto parts = f.separable_parts();
  if (!parts) return std::nullopt;
  std::vector<LinearPart> out;
  for (const Hamiltonian& part : *parts) {
    const auto lp = linear_height_part(part);
    if (!lp) return std::nullopt;
    out.push_back(*lp);
  }
  return out;
}

ChartPoint point_at_u(double u, double theta) {
  const double r = std::sqrt(u / (1.0 - u));
  return canonical_chart(ChartPoint{std::polar(r, theta), 0});
}

// Distance from the flow state at time t (advancing a copy started at st0).
double distance_at(const FlowIntegrator& integ, const FlowState& st0, double t,
                   const Point& x0) {
  FlowState st = st0;
  integ.advance(st, t);
  return distance(st.x, x0);
}

// Validate closure and holonomy action over one period; fills action_mod1
// and level, throws if the orbit does not close.
void validate_orbit(const Hamiltonian& f, OrbitRecord* orb) {
  FlowOptions opt;
  opt.lift = true;
  FlowIntegrator integ(f, opt);
  FlowState st = integ.start(orb->x0);
  orb->x0 = st.x;
  orb->level = st.f0;
  integ.advance(st, orb->primitive_period);
  const double closure = distance(st.x, orb->x0);
  if (closure > 1e-8)
    throw numeric_error("periodic orbit failed to close (closure " +
                        std::to_string(closure) + ")");
  double holo = 0.0;
  for (const cplx& a : st.lift_log) holo += a.imag();
  orb->action_mod1 = mod1(orb->primitive_period * st.f0 + holo / kTwoPi);
}

OrbitRecord level_circle_orbit(const Hamiltonian& f, double c) {
  // Ray scan for a level crossing.
  Point x0;
  bool found = false;
  for (int ray = 0; ray < 8 && !found; ++ray) {
    const double theta = kTwoPi * ray / 8.0;
    double ulo = 1e-6, uhi = 1.0 - 1e-6;
    auto eval = [&](double u) {
      Point x(1);
      x[0] = point_at_u(u, theta);
      return f.value(x) - c;
    };
    const int kScan = 256;
    double uprev = ulo, fprev = eval(ulo);
    for (int i = 1; i <= kScan; ++i) {
      const double u = ulo + (uhi - ulo) * i / kScan;
      const double fu = eval(u);
      if (fprev == 0.0 || fprev * fu < 0.0) {
        double a = uprev, b = u;
        for (int it = 0; it < 90; ++it) {
          const double mid = 0.5 * (a + b);
          if (eval(a) * eval(mid) <= 0.0)
            b = mid;
          else
            a = mid;
        }
        x0.assign(1, point_at_u(0.5 * (a + b), theta));
        found = true;
        break;
      }
      uprev = u;
      fprev = fu;
    }
  }
  if (!found) throw config_error("level not attained by the Hamiltonian");

  // First-return search: march until the distance to the start has a local
  // minimum well below the orbit scale, then refine by golden section.
  FlowIntegrator integ(f, FlowOptions{});
  FlowState st = integ.start(x0);
  const Point xstart = st.x;
  const double h = 0.004;
  double d1 = -1.0, d2 = -1.0;  // d at t - h, t - 2h
  double t_mid = -1.0;
  for (long k = 1; k <= 20000; ++k) {
    integ.advance(st, k * h);
    const double d = distance(st.x, xstart);
    if (k > 10 && d2 >= 0.0 && d1 < d2 && d1 <= d && d1 < 0.05) {
      t_mid = (k - 1) * h;
      break;
    }
    d2 = d1;
    d1 = d;
  }
  if (t_mid < 0.0) throw numeric_error("no return found within t <= 80");

  FlowState base = integ.start(xstart);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = t_mid - h, b = t_mid + h;
  double t1 = b - gr * (b - a), t2 = a + gr * (b - a);
  double f1 = distance_at(integ, base, t1, xstart);
  double f2 = distance_at(integ, base, t2, xstart);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      b = t2;
      t2 = t1;
      f2 = f1;
      t1 = b - gr * (b - a);
      f1 = distance_at(integ, base, t1, xstart);
    } else {
      a = t1;
      t1 = t2;
      f1 = f2;
      t2 = a + gr * (b - a);
      f2 = distance_at(integ, base, t2, xstart);
    }
  }

  OrbitRecord orb;
  orb.x0 = xstart;
  orb.primitive_period = 0.5 * (a + b);
  orb.tag = "level";
  validate_orbit(f, &orb);
  return orb;
}

}  // namespace

double mod1(double x) {
  double y = std::fmod(x, 1.0);
  if (y < 0.0) y += 1.0;
  return y;
}

std::vector<OrbitRecord> find_periodic_orbits(const Hamiltonian& f, double c) {
  std::vector<OrbitRecord> out;
  const auto parts = linear_height_parts(f);

  if (f.factors() == 1) {
    out.push_back(level_circle_orbit(f, c));
    return out;
  }

  if (!parts)
    throw config_error(
        "find_periodic_orbits: multi-factor Hamiltonians must be separable "
        "linear products");

  const int s = f.factors();
  double offset_total = 0.0;
  for (const LinearPart& lp : *parts) offset_total += lp.offset;

  // One circle candidate per (moving factor, pole configuration).
  for (int i = 0; i < s; ++i) {
    const double wi = (*parts)[static_cast<std::size_t>(i)].weight;
    if (std::abs(wi) < 1e-12) continue;
    const int others = s - 1;
    for (int mask = 0; mask < (1 << others); ++mask) {
      double rest = offset_total;
      int bit = 0;
      for (int j = 0; j < s; ++j) {
        if (j == i) continue;
        if (mask & (1 << bit)) rest += (*parts)[static_cast<std::size_t>(j)].weight;
        ++bit;
      }
      const double ustar = (c - rest) / wi;
      if (!(ustar > 1e-9 && ustar < 1.0 - 1e-9)) continue;

      OrbitRecord orb;
      orb.x0.assign(static_cast<std::size_t>(s), ChartPoint{cplx(0.0, 0.0), 0});
      orb.x0[static_cast<std::size_t>(i)] = point_at_u(ustar, 0.0);
      std::string bits;
      bit = 0;
      for (int j = 0; j < s; ++j) {
        if (j == i) continue;
        const bool north = (mask & (1 << bit)) != 0;
        orb.x0[static_cast<std::size_t>(j)].chart = north ? 1 : 0;
        bits += north ? '1' : '0';
        ++bit;
      }
      orb.primitive_period = 1.0 / std::abs(wi);
      orb.circle_factor = i;
      for (int j = 0; j < s; ++j) {
        if (j == i) continue;
        orb.transverse_angles.push_back(
            kTwoPi * (*parts)[static_cast<std::size_t>(j)].weight / std::abs(wi));
      }
      orb.tag = "circle" + std::to_string(i) + (bits.empty() ? "" : "_" + bits);
      validate_orbit(f, &orb);
      out.push_back(std::move(orb));
    }
  }
  if (out.empty()) throw config_error("no periodic circles at this level");
  return out;
}

std::vector<Resonance> resonances_in(const std::vector<OrbitRecord>& orbits,
                                     double c, double t_lo, double t_hi) {
  std::vector<Resonance> out;
  for (std::size_t oi = 0; oi < orbits.size(); ++oi) {
    const OrbitRecord& orb = orbits[oi];
    const double T = orb.primitive_period;
    const int m_lo = std::max(1, static_cast<int>(std::ceil(t_lo / T - 1e-12)));
    const int m_hi = static_cast<int>(std::floor(t_hi / T + 1e-12));
    for (int m = m_lo; m <= m_hi; ++m) {
      Resonance r;
      r.orbit_index = oi;
      r.repetition = m;
      r.t_j = m * T;
      r.action_mod1 = mod1(m * (orb.action_mod1 - T * c));
      double det = orb.transverse_angles.empty() ? 0.0 : 1.0;
      for (double psi : orb.transverse_angles) {
        const double sn = std::sin(0.5 * m * psi);
        det *= 4.0 * sn * sn;
      }
      r.stability_det = det;
      r.nondegenerate = det > 1e-8;
      out.push_back(r);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Resonance& a, const Resonance& b) { return a.t_j < b.t_j; });
  return out;
}

double liouville_volume(const Hamiltonian& f, double c) {
  if (f.factors() == 1) {
    return find_periodic_orbits(f, c)[0].primitive_period;
  }
  const auto parts = linear_height_parts(f);
  if (!parts || f.factors() != 2)
    throw config_error(
        "liouville_volume: supported for one factor or two-factor separable "
        "linear products");
  const double w1 = (*parts)[0].weight, w2 = (*parts)[1].weight;
  const double off = (*parts)[0].offset + (*parts)[1].offset;
  if (w1 <= 0.0 || w2 <= 0.0)
    throw config_error("liouville_volume: weights must be positive");
  const double cc = c - off;
  const double lo = std::max(0.0, (cc - w2) / w1);
  const double hi = std::min(1.0, cc / w1);
  return std::max(0.0, hi - lo) / w2;
}

}  // namespace btq
