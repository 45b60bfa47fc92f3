// SPDX-License-Identifier: MIT

#include "btq/hamiltonian.hpp"

#include <cctype>
#include <cmath>
#include <cstring>
#include <sstream>

#include "btq/errors.hpp"

namespace btq {

namespace {

// Value and partials (to second order) of P(z, z̄) from a coefficient matrix.
struct PolyJet {
  cplx p{}, pz{}, pzb{}, pzz{}, pzzb{}, pzbzb{};
};

PolyJet eval_poly(const Eigen::MatrixXcd& c, const cplx& z) {
  const int d = static_cast<int>(c.rows()) - 1;
  std::vector<cplx> zp(static_cast<std::size_t>(d) + 1),
      zbp(static_cast<std::size_t>(d) + 1);
  zp[0] = zbp[0] = 1.0;
  const cplx zb = std::conj(z);
  for (int k = 1; k <= d; ++k) {
    zp[static_cast<std::size_t>(k)] = zp[static_cast<std::size_t>(k - 1)] * z;
    zbp[static_cast<std::size_t>(k)] = zbp[static_cast<std::size_t>(k - 1)] * zb;
  }
  PolyJet j;
  for (int a = 0; a <= d; ++a) {
    for (int b = 0; b <= d; ++b) {
      const cplx cab = c(a, b);
      if (cab == 0.0) continue;
      const cplx za = zp[static_cast<std::size_t>(a)];
      const cplx zbb = zbp[static_cast<std::size_t>(b)];
      j.p += cab * za * zbb;
      if (a >= 1) j.pz += cab * double(a) * zp[static_cast<std::size_t>(a - 1)] * zbb;
      if (b >= 1) j.pzb += cab * double(b) * za * zbp[static_cast<std::size_t>(b - 1)];
      if (a >= 2)
        j.pzz += cab * double(a) * double(a - 1) * zp[static_cast<std::size_t>(a - 2)] * zbb;
      if (a >= 1 && b >= 1)
        j.pzzb += cab * double(a) * double(b) * zp[static_cast<std::size_t>(a - 1)] *
                  zbp[static_cast<std::size_t>(b - 1)];
      if (b >= 2)
        j.pzbzb += cab * double(b) * double(b - 1) * za * zbp[static_cast<std::size_t>(b - 2)];
    }
  }
  return j;
}

// Jet of P/Q^d with Q = 1+|z|^2 (quotient rule, exact).
struct RationalJet {
  cplx f{}, fz{}, fzb{}, fzz{}, fzzb{}, fzbzb{};
};

RationalJet eval_rational(const Eigen::MatrixXcd& c, int d, const cplx& z) {
  const PolyJet pj = eval_poly(c, z);
  const cplx zb = std::conj(z);
  const double q = 1.0 + std::norm(z);
  const double qd = std::pow(q, d);
  const cplx a = pj.pz * q - double(d) * zb * pj.p;
  const cplx b = pj.pzb * q - double(d) * z * pj.p;
  const cplx az = pj.pzz * q + (1.0 - d) * zb * pj.pz;
  const cplx azb = pj.pzzb * q + pj.pz * z - double(d) * (pj.p + zb * pj.pzb);
  const cplx bzb = pj.pzbzb * q + (1.0 - d) * z * pj.pzb;
  RationalJet r;
  r.f = pj.p / qd;
  r.fz = a / (qd * q);
  r.fzb = b / (qd * q);
  r.fzz = (az * q - (d + 1.0) * zb * a) / (qd * q * q);
  r.fzzb = (azb * q - (d + 1.0) * z * a) / (qd * q * q);
  r.fzbzb = (bzb * q - (d + 1.0) * z * b) / (qd * q * q);
  return r;
}

void fnv_mix(uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
}

std::vector<double> parse_csv_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    double v;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw config_error("preset: cannot parse number '" + item + "'");
    }
    while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
    if (pos != item.size())
      throw config_error("preset: trailing characters in number '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw config_error("preset: empty parameter list");
  return out;
}

}  // namespace

FactorPoly FactorPoly::constant(cplx v) {
  FactorPoly p;
  p.deg = 0;
  p.c = Eigen::MatrixXcd::Constant(1, 1, v);
  return p;
}

FactorPoly FactorPoly::height(double weight) {
  FactorPoly p;
  p.deg = 1;
  p.c = Eigen::MatrixXcd::Zero(2, 2);
  p.c(1, 1) = weight;
  return p;
}

FactorPoly FactorPoly::chart_flipped() const {
  FactorPoly p;
  p.deg = deg;
  p.c = c.reverse();  // c'(a,b) = c(deg-a, deg-b)
  return p;
}

bool FactorPoly::is_constant(double) const { return deg == 0; }

Hamiltonian::Hamiltonian(int factors, std::vector<ProductTerm> terms,
                         std::string description)
    : factors_(factors), terms_(std::move(terms)), description_(std::move(description)) {
  if (factors_ < 1) throw config_error("Hamiltonian: need at least one factor");
  for (const auto& t : terms_) {
    if (static_cast<int>(t.factor.size()) != factors_)
      throw config_error("Hamiltonian: term factor count mismatch");
    for (const auto& fp : t.factor) {
      if (fp.c.rows() != fp.deg + 1 || fp.c.cols() != fp.deg + 1)
        throw config_error("Hamiltonian: coefficient matrix shape mismatch");
    }
  }
  flipped_.reserve(terms_.size());
  for (const auto& t : terms_) {
    std::vector<FactorPoly> row;
    row.reserve(t.factor.size());
    for (const auto& fp : t.factor) row.push_back(fp.chart_flipped());
    flipped_.push_back(std::move(row));
  }

  // Reality check at deterministic sample points in both charts.
  uint64_t lcg = 0x9e3779b97f4a7c15ull;
  auto next01 = [&lcg]() {
    lcg = lcg * 6364136223846793005ull + 1442695040888963407ull;
    return double(lcg >> 11) * 0x1.0p-53;
  };
  for (int trial = 0; trial < 32; ++trial) {
    Point x(static_cast<std::size_t>(factors_));
    for (auto& xp : x) {
      xp.zeta = std::polar(next01(), kTwoPi * next01());
      xp.chart = (next01() < 0.5) ? 0 : 1;
    }
    cplx total = 0.0;
    for (std::size_t ti = 0; ti < terms_.size(); ++ti) {
      cplx prod = 1.0;
      for (std::size_t fi = 0; fi < x.size(); ++fi) {
        const FactorPoly& fp = poly_for(x[fi], ti, fi);
        prod *= eval_rational(fp.c, fp.deg, x[fi].zeta).f;
      }
      total += prod;
    }
    if (std::abs(total.imag()) > 1e-11 * (1.0 + std::abs(total.real())))
      throw config_error("Hamiltonian: not real-valued");
  }
}

const FactorPoly& Hamiltonian::poly_for(const ChartPoint& x, std::size_t term,
                                        std::size_t factor) const {
  return (x.chart == 0) ? terms_[term].factor[factor] : flipped_[term][factor];
}

double Hamiltonian::value(const Point& x) const {
  cplx total = 0.0;
  for (std::size_t ti = 0; ti < terms_.size(); ++ti) {
    cplx prod = 1.0;
    for (std::size_t fi = 0; fi < x.size(); ++fi) {
      const FactorPoly& fp = poly_for(x[fi], ti, fi);
      prod *= eval_rational(fp.c, fp.deg, x[fi].zeta).f;
    }
    total += prod;
  }
  return total.real();
}

Jet2 Hamiltonian::jet(const Point& x) const {
  const std::size_t s = x.size();
  Jet2 out;
  out.fz.assign(s, 0.0);
  out.fzb.assign(s, 0.0);
  out.fzz = Eigen::MatrixXcd::Zero(static_cast<int>(s), static_cast<int>(s));
  out.fzzb = Eigen::MatrixXcd::Zero(static_cast<int>(s), static_cast<int>(s));
  out.fzbzb = Eigen::MatrixXcd::Zero(static_cast<int>(s), static_cast<int>(s));
  cplx total = 0.0;

  std::vector<RationalJet> fj(s);
  for (std::size_t ti = 0; ti < terms_.size(); ++ti) {
    for (std::size_t fi = 0; fi < s; ++fi) {
      const FactorPoly& fp = poly_for(x[fi], ti, fi);
      fj[fi] = eval_rational(fp.c, fp.deg, x[fi].zeta);
    }
    // rest(i) = prod_{k != i} f_k, rest2(i,j) = prod_{k != i,j} f_k.
    auto rest = [&fj, s](std::size_t skip1, std::size_t skip2) {
      cplx r = 1.0;
      for (std::size_t k = 0; k < s; ++k)
        if (k != skip1 && k != skip2) r *= fj[k].f;
      return r;
    };
    cplx prod = 1.0;
    for (std::size_t k = 0; k < s; ++k) prod *= fj[k].f;
    total += prod;
    for (std::size_t i = 0; i < s; ++i) {
      const cplx ri = rest(i, i);
      out.fz[i] += fj[i].fz * ri;
      out.fzb[i] += fj[i].fzb * ri;
      const int ii = static_cast<int>(i);
      out.fzz(ii, ii) += fj[i].fzz * ri;
      out.fzzb(ii, ii) += fj[i].fzzb * ri;
      out.fzbzb(ii, ii) += fj[i].fzbzb * ri;
      for (std::size_t j = 0; j < s; ++j) {
        if (j == i) continue;
        const int jj = static_cast<int>(j);
        const cplx rij = rest(i, j);
        out.fzz(ii, jj) += fj[i].fz * fj[j].fz * rij;
        out.fzzb(ii, jj) += fj[i].fz * fj[j].fzb * rij;
        out.fzbzb(ii, jj) += fj[i].fzb * fj[j].fzb * rij;
      }
    }
  }
  out.f = total.real();
  return out;
}

std::vector<cplx> Hamiltonian::xi(const Point& x) const {
  return xi_from_jet(jet(x), x);
}

std::vector<cplx> Hamiltonian::xi_from_jet(const Jet2& j, const Point& x) {
  std::vector<cplx> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double q = 1.0 + std::norm(x[i].zeta);
    v[i] = cplx(0.0, -kTwoPi) * q * q * j.fzb[i];
  }
  return v;
}

Eigen::MatrixXd Hamiltonian::xi_jacobian(const Point& x) const {
  return xi_jacobian_from_jet(jet(x), x);
}

Eigen::MatrixXd Hamiltonian::xi_jacobian_from_jet(const Jet2& j, const Point& x) {
  const int s = static_cast<int>(x.size());
  Eigen::MatrixXd jac(2 * s, 2 * s);
  for (int i = 0; i < s; ++i) {
    const cplx zi = x[static_cast<std::size_t>(i)].zeta;
    const double qi = 1.0 + std::norm(zi);
    const cplx mi = cplx(0.0, -kTwoPi);
    for (int jcol = 0; jcol < s; ++jcol) {
      const cplx zj = x[static_cast<std::size_t>(jcol)].zeta;
      // W = d xi^{z_i} / d z_j, V = d xi^{z_i} / d z̄_j.
      cplx w = mi * qi * qi * j.fzzb(jcol, i);   // f_{z̄_i z_j}
      cplx v = mi * qi * qi * j.fzbzb(i, jcol);  // f_{z̄_i z̄_j}
      if (i == jcol) {
        w += mi * 2.0 * qi * std::conj(zj) * j.fzb[static_cast<std::size_t>(i)];
        v += mi * 2.0 * qi * zj * j.fzb[static_cast<std::size_t>(i)];
      }
      const cplx da = w + v;
      const cplx db = cplx(0.0, 1.0) * (w - v);
      jac(2 * i, 2 * jcol) = da.real();
      jac(2 * i + 1, 2 * jcol) = da.imag();
      jac(2 * i, 2 * jcol + 1) = db.real();
      jac(2 * i + 1, 2 * jcol + 1) = db.imag();
    }
  }
  return jac;
}

std::optional<std::vector<Hamiltonian>> Hamiltonian::separable_parts() const {
  std::vector<std::vector<ProductTerm>> parts(static_cast<std::size_t>(factors_));
  double constant_total = 0.0;
  for (const auto& t : terms_) {
    int active = -1;
    cplx const_prod = 1.0;
    for (int fi = 0; fi < factors_; ++fi) {
      const FactorPoly& fp = t.factor[static_cast<std::size_t>(fi)];
      if (fp.is_constant()) {
        const_prod *= fp.c(0, 0);
      } else if (active < 0) {
        active = fi;
      } else {
        return std::nullopt;  // genuinely coupled term
      }
    }
    if (active < 0) {
      constant_total += (const_prod).real();
    } else {
      ProductTerm single;
      FactorPoly fp = t.factor[static_cast<std::size_t>(active)];
      fp.c *= const_prod;
      single.factor.push_back(fp);
      parts[static_cast<std::size_t>(active)].push_back(std::move(single));
    }
  }
  if (constant_total != 0.0) {
    ProductTerm single;
    single.factor.push_back(FactorPoly::constant(constant_total));
    parts[0].push_back(std::move(single));
  }
  std::vector<Hamiltonian> out;
  out.reserve(parts.size());
  for (auto& pl : parts) {
    if (pl.empty()) {
      ProductTerm zero;
      zero.factor.push_back(FactorPoly::constant(0.0));
      pl.push_back(std::move(zero));
    }
    out.emplace_back(1, std::move(pl));
  }
  return out;
}

uint64_t Hamiltonian::hash() const {
  uint64_t h = 1469598103934665603ull;
  fnv_mix(h, &factors_, sizeof(factors_));
  for (const auto& t : terms_) {
    for (const auto& fp : t.factor) {
      fnv_mix(h, &fp.deg, sizeof(fp.deg));
      for (int a = 0; a <= fp.deg; ++a)
        for (int b = 0; b <= fp.deg; ++b) {
          const double re = fp.c(a, b).real(), im = fp.c(a, b).imag();
          fnv_mix(h, &re, sizeof(re));
          fnv_mix(h, &im, sizeof(im));
        }
    }
  }
  return h;
}

Hamiltonian Hamiltonian::preset(const std::string& name, int factors) {
  auto weights_model = [factors, &name](const std::vector<double>& w) {
    if (static_cast<int>(w.size()) != factors)
      throw config_error("preset '" + name + "': weight count != factor count");
    std::vector<ProductTerm> terms;
    for (int i = 0; i < factors; ++i) {
      ProductTerm t;
      for (int j = 0; j < factors; ++j)
        t.factor.push_back(i == j ? FactorPoly::height(w[static_cast<std::size_t>(i)])
                                  : FactorPoly::constant(1.0));
      terms.push_back(std::move(t));
    }
    return terms;
  };

  const std::size_t colon = name.find(':');
  const std::string kind = name.substr(0, colon);
  const std::string args = (colon == std::string::npos) ? "" : name.substr(colon + 1);

  if (kind == "rotation") {
    return Hamiltonian(factors, weights_model(std::vector<double>(
                                    static_cast<std::size_t>(factors), 1.0)),
                       name);
  }
  if (kind == "product") {
    return Hamiltonian(factors, weights_model(parse_csv_doubles(args)), name);
  }
  if (kind == "radial") {
    if (factors != 1) throw config_error("preset 'radial' needs exactly one factor");
    const std::vector<double> cj = parse_csv_doubles(args);
    std::vector<ProductTerm> terms;
    for (std::size_t jdx = 0; jdx < cj.size(); ++jdx) {
      if (cj[jdx] == 0.0) continue;
      FactorPoly fp;
      fp.deg = static_cast<int>(jdx);
      fp.c = Eigen::MatrixXcd::Zero(fp.deg + 1, fp.deg + 1);
      fp.c(fp.deg, fp.deg) = cj[jdx];
      ProductTerm t;
      t.factor.push_back(std::move(fp));
      terms.push_back(std::move(t));
    }
    if (terms.empty()) {
      ProductTerm t;
      t.factor.push_back(FactorPoly::constant(0.0));
      terms.push_back(std::move(t));
    }
    return Hamiltonian(1, std::move(terms), name);
  }
  if (kind == "perturbed") {
    if (factors != 1) throw config_error("preset 'perturbed' needs exactly one factor");
    const std::vector<double> eps =
        args.empty() ? std::vector<double>{0.2} : parse_csv_doubles(args);
    if (eps.size() != 1) throw config_error("preset 'perturbed' takes one parameter");
    ProductTerm t0;
    t0.factor.push_back(FactorPoly::height(1.0));
    // quadrupole term: a dipole Re z/(1+|z|^2) would still be a moment-map
    // component, i.e. a rigid rotation, whose transport is exact; degree 2
    // is the smallest perturbation with a genuinely nonlinear flow
    FactorPoly bump;
    bump.deg = 2;
    bump.c = Eigen::MatrixXcd::Zero(3, 3);
    bump.c(2, 0) = 0.5 * eps[0];
    bump.c(0, 2) = 0.5 * eps[0];
    ProductTerm t1;
    t1.factor.push_back(std::move(bump));
    std::vector<ProductTerm> terms;
    terms.push_back(std::move(t0));
    terms.push_back(std::move(t1));
    return Hamiltonian(1, std::move(terms), name);
  }
  throw config_error("unknown Hamiltonian preset '" + name + "'");
}

}  // namespace btq
