// SPDX-License-Identifier: MIT

#include "btq/cli.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <initializer_list>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "CLI11.hpp"
#include "btq/basis.hpp"
#include "btq/checks.hpp"
#include "btq/errors.hpp"
#include "btq/flow.hpp"
#include "btq/geometry.hpp"
#include "btq/grid.hpp"
#include "btq/gutzwiller.hpp"
#include "btq/hamiltonian.hpp"
#include "btq/io.hpp"
#include "btq/operators.hpp"
#include "btq/orbits.hpp"
#include "btq/sections.hpp"
#include "btq/trace.hpp"
#include "btq/window.hpp"

namespace btq {

namespace {

struct CliOptions {
  std::string config;
  std::string out = "out";
  std::string cache;
  int jobs = 1;
};

// Every key any verb understands; parsing rejects the rest with line info.
const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> k = {
      {"geometry", {"factors", "twist"}},
      {"hamiltonian", {"preset"}},
      {"window", {"center", "halfwidth", "nu"}},
      {"trace", {"c", "p"}},
      {"quantize", {"p"}},
      {"spectrum", {"p"}},
      {"evolve", {"p", "t", "u0", "theta0", "sign"}},
      {"gutzwiller", {"rmax"}},
      {"check", {"names"}},
      {"cache", {"dir", "max_bytes"}},
  };
  return k;
}

ConfigFile load_config(const CliOptions& cli) {
  if (cli.config.empty()) throw config_error("this verb requires --config <path>");
  ConfigFile cfg = ConfigFile::parse_file(cli.config);
  cfg.require_known(known_keys());
  return cfg;
}

ModelGeometry geometry_from(const ConfigFile& cfg) {
  const int factors = cfg.get_int("geometry", "factors", 1);
  const int twist = cfg.get_int("geometry", "twist", 0);
  if (factors < 1 || factors > 4)
    throw config_error("geometry.factors must be in [1,4]");
  if (twist == 0) return ModelGeometry::untwisted(factors);
  if (twist == -1) return ModelGeometry::metaplectic(factors);
  throw config_error("geometry.twist must be 0 or -1");
}

Hamiltonian hamiltonian_from(const ConfigFile& cfg, const ModelGeometry& geom) {
  return Hamiltonian::preset(cfg.get_string("hamiltonian", "preset", "rotation"),
                             geom.factors);
}

WindowFunction window_from(const ConfigFile& cfg) {
  return WindowFunction(cfg.get_double("window", "center"),
                        cfg.get_double("window", "halfwidth"),
                        cfg.get_int("window", "nu", 8));
}

// Precedence: --cache flag, then BTQ_CACHE_DIR, then [cache] dir.
BlobCache cache_from(const CliOptions& cli, const ConfigFile* cfg) {
  if (!cli.cache.empty()) return BlobCache(cli.cache);
  if (const char* env = std::getenv("BTQ_CACHE_DIR"); env && *env)
    return BlobCache(env);
  if (cfg && cfg->has("cache", "dir")) return BlobCache(cfg->get_string("cache", "dir"));
  return BlobCache("");
}

std::vector<double> parse_doubles(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(item, &pos);
      while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos])))
        ++pos;
      if (pos != item.size()) throw std::invalid_argument("trail");
      out.push_back(v);
    } catch (const std::exception&) {
      throw config_error(what + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw config_error(what + ": empty list");
  return out;
}

ChartPoint canonical_from_u(double u, double theta) {
  if (u <= 0.0 || u >= 1.0) throw config_error("u0 entries must lie in (0,1)");
  const double r = std::sqrt(u / (1.0 - u));
  ChartPoint x;
  if (r <= 1.0) {
    x.zeta = std::polar(r, theta);
    x.chart = 0;
  } else {
    x.zeta = std::polar(1.0 / r, -theta);
    x.chart = 1;
  }
  return x;
}

uint64_t mix_hash(std::initializer_list<uint64_t> words) {
  uint64_t h = 1469598103934665603ull;
  for (uint64_t w : words) {
    for (int b = 0; b < 8; ++b) {
      h ^= (w >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return h;
}

// Index-ordered parallel sweep; rethrows the first worker exception.
void parallel_for(int jobs, std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min<std::size_t>(jobs, n);
  for (int i = 0; i < count; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

// Eigendecomposition with blob caching. Vectors are stored only for small
// dimensions; spectra-only blobs use a separate kind so both stay valid.
SpectralData spectral_with_cache(const BlobCache& cache, const ModelGeometry& geom,
                                 const Hamiltonian& f, int p, bool need_vectors) {
  const uint64_t key = mix_hash({geom.hash(), f.hash(), uint64_t(p)});
  const char* kind = need_vectors ? "eig" : "spec";
  if (cache.enabled()) {
    if (auto hit = cache.load(kind, key)) {
      const std::vector<double>& v = *hit;
      if (!v.empty()) {
        const int dim = static_cast<int>(v[0]);
        const std::size_t want =
            1 + std::size_t(dim) + (need_vectors ? 2 * std::size_t(dim) * dim : 0);
        if (dim > 0 && v.size() == want) {
          SpectralData sd;
          sd.evals = Eigen::Map<const Eigen::VectorXd>(v.data() + 1, dim);
          if (need_vectors) {
            sd.vecs.resize(dim, dim);
            const double* base = v.data() + 1 + dim;
            for (int c = 0; c < dim; ++c)
              for (int r = 0; r < dim; ++r) {
                const std::size_t at = 2 * (std::size_t(c) * dim + r);
                sd.vecs(r, c) = cplx(base[at], base[at + 1]);
              }
          }
          return sd;
        }
      }
    }
  }
  OperatorAssembler assembler(geom, f, p);
  SpectralData sd = spectral_decompose(assembler.kostant_souriau());
  if (cache.enabled() && (!need_vectors || sd.evals.size() <= 1024)) {
    std::vector<double> v;
    const int dim = static_cast<int>(sd.evals.size());
    v.push_back(dim);
    for (int i = 0; i < dim; ++i) v.push_back(sd.evals(i));
    if (need_vectors) {
      for (int c = 0; c < dim; ++c)
        for (int r = 0; r < dim; ++r) {
          v.push_back(sd.vecs(r, c).real());
          v.push_back(sd.vecs(r, c).imag());
        }
    }
    cache.store(kind, key, v);
  }
  return sd;
}

// Smoothed trace at one level; separable two-factor models go through the
// per-factor sum-set spectra, everything else through the dense spectrum.
cplx trace_at(const BlobCache& cache, const ModelGeometry& geom, const Hamiltonian& f,
              int p, double c, const WindowFunction& win) {
  if (geom.factors == 2 && f.separable_parts().has_value()) {
    const auto spectra = separable_spectra(f, geom, p);
    return smoothed_trace_sumset(spectra[0], spectra[1], p, c, win).value;
  }
  const SpectralData sd = spectral_with_cache(cache, geom, f, p, false);
  const std::vector<double> evals(sd.evals.data(), sd.evals.data() + sd.evals.size());
  return smoothed_trace(evals, p, c, win).value;
}

std::string out_path(const CliOptions& cli, const std::string& file) {
  if (cli.out.empty()) return file;
  return cli.out + "/" + file;
}

// ---------------------------------------------------------------------------
// verbs

int verb_quantize(const CliOptions& cli) {
  const ConfigFile cfg = load_config(cli);
  const ModelGeometry geom = geometry_from(cfg);
  const Hamiltonian f = hamiltonian_from(cfg, geom);
  const BlobCache cache = cache_from(cli, &cfg);
  const std::vector<int> ps = cfg.get_int_list("quantize", "p");

  CsvWriter csv(out_path(cli, "operator.csv"), {"p", "row", "col", "re", "im"});
  for (int p : ps) {
    OperatorAssembler assembler(geom, f, p);
    const Eigen::MatrixXcd q = assembler.kostant_souriau();
    for (Eigen::Index r = 0; r < q.rows(); ++r)
      for (Eigen::Index c = 0; c < q.cols(); ++c)
        csv.row({std::to_string(p), std::to_string(r), std::to_string(c),
                 format_g17(q(r, c).real()), format_g17(q(r, c).imag())});
    if (cache.enabled()) spectral_with_cache(cache, geom, f, p, true);
    std::cout << "quantize p=" << p << " dim=" << q.rows()
              << " hermiticity=" << format_g17(hermiticity_defect(q)) << "\n";
  }
  return 0;
}

int verb_spectrum(const CliOptions& cli) {
  const ConfigFile cfg = load_config(cli);
  const ModelGeometry geom = geometry_from(cfg);
  const Hamiltonian f = hamiltonian_from(cfg, geom);
  const BlobCache cache = cache_from(cli, &cfg);
  const std::vector<int> ps = cfg.get_int_list("spectrum", "p");

  std::vector<std::vector<double>> evals(ps.size());
  parallel_for(cli.jobs, ps.size(), [&](std::size_t i) {
    const SpectralData sd = spectral_with_cache(cache, geom, f, ps[i], false);
    evals[i].assign(sd.evals.data(), sd.evals.data() + sd.evals.size());
  });

  CsvWriter csv(out_path(cli, "spectrum.csv"), {"p", "k", "lambda"});
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t k = 0; k < evals[i].size(); ++k)
      csv.row({std::to_string(ps[i]), std::to_string(k), format_g17(evals[i][k])});
  std::cout << "spectrum: " << ps.size() << " level(s) written\n";
  return 0;
}

int verb_evolve(const CliOptions& cli) {
  const ConfigFile cfg = load_config(cli);
  const ModelGeometry geom = geometry_from(cfg);
  const Hamiltonian f = hamiltonian_from(cfg, geom);
  const BlobCache cache = cache_from(cli, &cfg);
  const int p = cfg.get_int("evolve", "p");
  const double t = cfg.get_double("evolve", "t");
  const int sign = cfg.get_int("evolve", "sign", +1);
  if (sign != 1 && sign != -1) throw config_error("evolve.sign must be 1 or -1");
  if (geom.factors != 1)
    throw config_error("evolve profile export supports a single factor");

  const std::vector<double> u0 = parse_doubles(cfg.get_string("evolve", "u0"), "evolve.u0");
  const std::vector<double> th0 =
      parse_doubles(cfg.get_string("evolve", "theta0"), "evolve.theta0");
  if (u0.size() != 1 || th0.size() != 1)
    throw config_error("evolve.u0/theta0 need one entry per factor");
  const Point x0{canonical_from_u(u0[0], th0[0])};

  const SpectralData sd = spectral_with_cache(cache, geom, f, p, true);
  const Eigen::MatrixXcd u_op = evolution_operator(sd, p, t, sign);
  const QuantumBasis basis(geom, p);
  const Eigen::VectorXcd evolved = u_op * coherent_state(basis, x0);

  const QuadratureGrid grid = QuadratureGrid::for_degree(geom, p, 0, 1.0);
  const Eigen::MatrixXcd btab = basis_table(basis, grid);
  const Eigen::VectorXcd samples = btab * evolved;

  CsvWriter csv(out_path(cli, "profile.csv"),
                {"x_re", "x_im", "chart", "value_re", "value_im", "pointwise_norm"});
  double best = -1.0;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    const ChartPoint x = grid.point(i)[0];
    const cplx v = samples(static_cast<Eigen::Index>(i));
    csv.row({format_g17(x.zeta.real()), format_g17(x.zeta.imag()),
             std::to_string(x.chart), format_g17(v.real()), format_g17(v.imag()),
             format_g17(std::abs(v))});
    if (std::norm(v) > best) {
      best = std::norm(v);
      best_i = i;
    }
  }
  const Point target = flow_map(f, x0, sign > 0 ? t : -t).x;
  std::cout << "evolve: peak distance to transported center = "
            << format_g17(distance(grid.point(best_i), target)) << "\n";
  return 0;
}

int verb_trace(const CliOptions& cli) {
  const ConfigFile cfg = load_config(cli);
  const ModelGeometry geom = geometry_from(cfg);
  const Hamiltonian f = hamiltonian_from(cfg, geom);
  const BlobCache cache = cache_from(cli, &cfg);
  const WindowFunction win = window_from(cfg);
  const double c = cfg.get_double("trace", "c");
  const std::vector<int> ps = cfg.get_int_list("trace", "p");

  std::vector<cplx> values(ps.size());
  parallel_for(cli.jobs, ps.size(), [&](std::size_t i) {
    values[i] = trace_at(cache, geom, f, ps[i], c, win);
  });

  CsvWriter csv(out_path(cli, "traces.csv"), {"p", "re", "im"});
  for (std::size_t i = 0; i < ps.size(); ++i)
    csv.row({std::to_string(ps[i]), format_g17(values[i].real()),
             format_g17(values[i].imag())});
  std::cout << "trace: " << ps.size() << " value(s) written\n";
  return 0;
}

int verb_gutzwiller(const CliOptions& cli) {
  const ConfigFile cfg = load_config(cli);
  const ModelGeometry geom = geometry_from(cfg);
  const Hamiltonian f = hamiltonian_from(cfg, geom);
  const BlobCache cache = cache_from(cli, &cfg);
  const WindowFunction win = window_from(cfg);
  const double c = cfg.get_double("trace", "c");
  const std::vector<int> ps = cfg.get_int_list("trace", "p");
  const int rmax = cfg.get_int("gutzwiller", "rmax", 1);
  if (rmax < 0 || rmax > 3) throw config_error("gutzwiller.rmax must be in [0,3]");

  const GutzwillerModel model = gutzwiller_model(f, c, win);

  {
    CsvWriter csv(out_path(cli, "orbits.csv"),
                  {"level", "period", "resonant_time", "action_mod1", "stab_det",
                   "nondeg_flag"});
    const auto res =
        resonances_in(model.orbits, c, win.support_lo(), win.support_hi());
    for (const Resonance& r : res) {
      const OrbitRecord& orb = model.orbits[r.orbit_index];
      csv.row({format_g17(orb.level), format_g17(orb.primitive_period),
               format_g17(r.t_j), format_g17(r.action_mod1),
               format_g17(r.stability_det), r.nondegenerate ? "1" : "0"});
    }
  }

  std::vector<cplx> values(ps.size());
  parallel_for(cli.jobs, ps.size(), [&](std::size_t i) {
    values[i] = trace_at(cache, geom, f, ps[i], c, win);
  });
  {
    CsvWriter csv(out_path(cli, "traces.csv"), {"p", "re", "im"});
    for (std::size_t i = 0; i < ps.size(); ++i)
      csv.row({std::to_string(ps[i]), format_g17(values[i].real()),
               format_g17(values[i].imag())});
  }

  CsvWriter csv(out_path(cli, "fits.csv"),
                {"term_id", "alpha", "lambda", "coeff_re", "coeff_im", "residual"});
  if (!model.terms.empty()) {
    const ExpansionFit fit = fit_trace_terms(ps, values, model.terms, rmax);
    for (std::size_t j = 0; j < model.terms.size(); ++j)
      for (int r = 0; r <= rmax; ++r) {
        const cplx coeff = fit.coeff[j * std::size_t(rmax + 1) + std::size_t(r)];
        csv.row({model.terms[j].tag, std::to_string(r),
                 format_g17(model.terms[j].action_mod1), format_g17(coeff.real()),
                 format_g17(coeff.imag()), format_g17(fit.residual_rms)});
      }
    std::cout << "gutzwiller: " << model.terms.size() << " term(s), residual rms = "
              << format_g17(fit.residual_rms) << "\n";
  } else {
    std::cout << "gutzwiller: no nondegenerate resonances in the window\n";
  }
  return 0;
}

int verb_check(const CliOptions& cli) {
  const ConfigFile cfg = load_config(cli);
  const std::string names = cfg.get_string("check", "names", "all");

  std::vector<std::string> wanted;
  if (names == "all") {
    wanted = check_names();
  } else {
    std::stringstream ss(names);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto a = item.find_first_not_of(" \t");
      const auto b = item.find_last_not_of(" \t");
      if (a == std::string::npos) continue;
      wanted.push_back(item.substr(a, b - a + 1));
    }
    if (wanted.empty()) throw config_error("check.names is empty");
  }

  std::vector<CheckReport> reports(wanted.size());
  parallel_for(cli.jobs, wanted.size(),
               [&](std::size_t i) { reports[i] = run_check(wanted[i]); });

  CsvWriter csv(out_path(cli, "checks.csv"),
                {"name", "measured", "predicted", "rel_err", "verdict"});
  bool failed = false;
  for (const CheckReport& rep : reports) {
    for (const CheckResult& r : rep.results)
      csv.row({r.name, format_g17(r.measured), format_g17(r.predicted),
               format_g17(r.rel_err), r.pass ? "pass" : "fail"});
    const bool ok = rep.pass();
    if (!ok && rep.blocking) failed = true;
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << rep.criterion
              << (rep.blocking || ok ? "" : " (non-blocking)") << ": "
              << rep.description << "\n";
  }
  return failed ? 1 : 0;
}

int verb_cache_gc(const CliOptions& cli) {
  ConfigFile cfg;
  const ConfigFile* cfgp = nullptr;
  if (!cli.config.empty()) {
    cfg = load_config(cli);
    cfgp = &cfg;
  }
  const BlobCache cache = cache_from(cli, cfgp);
  if (!cache.enabled())
    throw config_error("cache-gc needs a cache directory (--cache, BTQ_CACHE_DIR, or [cache] dir)");
  const long long max_bytes =
      cfgp ? cfgp->get_int("cache", "max_bytes", 1 << 30) : (1 << 30);
  if (max_bytes < 0) throw config_error("cache.max_bytes must be >= 0");
  const BlobCache::GcReport rep = cache.gc(static_cast<std::uintmax_t>(max_bytes));
  std::cout << "cache-gc: " << rep.bytes_before << " -> " << rep.bytes_after
            << " bytes, evicted " << rep.evicted << ", quarantined "
            << rep.quarantined << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CliOptions cli;
  CLI::App app{"Berezin-Toeplitz quantization workbench"};
  app.require_subcommand(1);
  app.add_option("--config", cli.config, "experiment config file");
  app.add_option("--out", cli.out, "output directory for CSV reports");
  app.add_option("--cache", cli.cache, "eigendecomposition cache directory");
  app.add_option("--jobs", cli.jobs, "worker threads for sweeps")
      ->check(CLI::Range(1, 256));
  CLI::App* sub_quantize = app.add_subcommand("quantize", "assemble operators");
  CLI::App* sub_spectrum = app.add_subcommand("spectrum", "eigenvalue sweeps");
  CLI::App* sub_evolve = app.add_subcommand("evolve", "propagate a coherent state");
  CLI::App* sub_trace = app.add_subcommand("trace", "smoothed spectral sums");
  CLI::App* sub_gutzwiller =
      app.add_subcommand("gutzwiller", "orbit model, traces and oscillatory fit");
  CLI::App* sub_check = app.add_subcommand("check", "named verification checks");
  CLI::App* sub_gc = app.add_subcommand("cache-gc", "evict cache entries");
  // the global flags may appear after the verb; unmatched options fall
  // through to the parent parser
  for (CLI::App* sub : {sub_quantize, sub_spectrum, sub_evolve, sub_trace,
                        sub_gutzwiller, sub_check, sub_gc})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sub_quantize->parsed()) return verb_quantize(cli);
    if (sub_spectrum->parsed()) return verb_spectrum(cli);
    if (sub_evolve->parsed()) return verb_evolve(cli);
    if (sub_trace->parsed()) return verb_trace(cli);
    if (sub_gutzwiller->parsed()) return verb_gutzwiller(cli);
    if (sub_check->parsed()) return verb_check(cli);
    if (sub_gc->parsed()) return verb_cache_gc(cli);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const numeric_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace btq
