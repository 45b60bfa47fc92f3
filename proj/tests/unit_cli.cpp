// SPDX-License-Identifier: MIT
//
// In-process tests of the command line driver: exit codes, config
// validation, deterministic CSV output, cache behavior, and the numeric
// content of small end-to-end runs.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "btq/cli.hpp"
#include "btq/geometry.hpp"
#include "btq/window.hpp"

using namespace btq;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / (tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str(const std::string& leaf = "") const {
    return leaf.empty() ? path.string() : (path / leaf).string();
  }
};

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "btq");
  std::vector<char*> argv;
  argv.reserve(args.size());
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

int count_blobs(const fs::path& dir) {
  int n = 0;
  for (const auto& de : fs::directory_iterator(dir))
    if (de.path().extension() == ".blob") ++n;
  return n;
}

}  // namespace

TEST_CASE("argument and config failures exit with code 2") {
  TempDir tmp("btq-cli-err");
  CHECK(run({}) == 2);                          // no subcommand
  CHECK(run({"frobnicate"}) == 2);              // unknown subcommand
  CHECK(run({"spectrum", "--bogus"}) == 2);     // unknown flag
  CHECK(run({"spectrum"}) == 2);                // missing --config
  CHECK(run({"spectrum", "--config", tmp.str("absent.cfg")}) == 2);

  const std::string cfg = tmp.str("bad.cfg");
  write_file(cfg, "[spectrum]\np = 8\n[bogus]\nx = 1\n");
  CHECK(run({"spectrum", "--config", cfg}) == 2);  // unknown section

  write_file(cfg, "[spectrum]\np = 8\nq = 1\n");
  CHECK(run({"spectrum", "--config", cfg}) == 2);  // unknown key

  write_file(cfg, "[geometry]\nfactors = 9\n[spectrum]\np = 8\n");
  CHECK(run({"spectrum", "--config", cfg}) == 2);  // factors out of range

  write_file(cfg, "[geometry]\ntwist = 7\n[spectrum]\np = 8\n");
  CHECK(run({"spectrum", "--config", cfg}) == 2);  // unsupported twist

  write_file(cfg, "[spectrum]\np = 8\n");
  CHECK(run({"spectrum", "--config", cfg, "--jobs", "0"}) == 2);  // range

  write_file(cfg, "[hamiltonian]\npreset = nope\n[spectrum]\np = 8\n");
  CHECK(run({"spectrum", "--config", cfg}) == 2);  // unknown preset

  CHECK(run({"cache-gc"}) == 2);  // no cache directory from any source
}

TEST_CASE("spectrum sweep: content, determinism, parallel equivalence") {
  TempDir tmp("btq-cli-spec");
  const std::string cfg = tmp.str("s.cfg");
  write_file(cfg,
             "[geometry]\nfactors = 1\ntwist = 0\n"
             "[hamiltonian]\npreset = rotation\n"
             "[spectrum]\np = 8, 12\n");

  CHECK(run({"spectrum", "--config", cfg, "--out", tmp.str("a")}) == 0);
  const auto rows = read_csv(tmp.str("a/spectrum.csv"));
  REQUIRE(rows.size() == 1 + 9 + 13);
  CHECK(rows[0] == std::vector<std::string>{"p", "k", "lambda"});
  // exact height spectrum k/p
  CHECK(rows[1] == std::vector<std::string>{"8", "0", "0"});
  CHECK(std::stod(rows[3][2]) == doctest::Approx(2.0 / 8.0).epsilon(1e-13));
  CHECK(std::stod(rows[10][2]) == doctest::Approx(0.0).epsilon(1e-13));

  // bit-identical across reruns and across thread counts
  CHECK(run({"spectrum", "--config", cfg, "--out", tmp.str("b")}) == 0);
  CHECK(run({"spectrum", "--config", cfg, "--out", tmp.str("c"), "--jobs", "3"}) == 0);
  const std::string a = slurp(tmp.str("a/spectrum.csv"));
  CHECK(a == slurp(tmp.str("b/spectrum.csv")));
  CHECK(a == slurp(tmp.str("c/spectrum.csv")));
}

TEST_CASE("quantize writes the operator table") {
  TempDir tmp("btq-cli-quant");
  const std::string cfg = tmp.str("q.cfg");
  write_file(cfg,
             "[geometry]\nfactors = 1\ntwist = -1\n"
             "[hamiltonian]\npreset = radial:0,1,0.25\n"
             "[quantize]\np = 6\n");
  CHECK(run({"quantize", "--config", cfg, "--out", tmp.str("out")}) == 0);
  const auto rows = read_csv(tmp.str("out/operator.csv"));
  REQUIRE(rows.size() == 1 + 6 * 6);  // metaplectic dim p
  CHECK(rows[0] == std::vector<std::string>{"p", "row", "col", "re", "im"});
  // hermitian: entry (0,1) is the conjugate of (1,0)
  CHECK(std::stod(rows[1 + 1][3]) == doctest::Approx(std::stod(rows[1 + 6][3])));
  CHECK(std::stod(rows[1 + 1][4]) == doctest::Approx(-std::stod(rows[1 + 6][4])));
}

TEST_CASE("trace values match an in-process recomputation") {
  TempDir tmp("btq-cli-trace");
  const std::string cfg = tmp.str("t.cfg");
  write_file(cfg,
             "[geometry]\nfactors = 1\ntwist = 0\n"
             "[hamiltonian]\npreset = rotation\n"
             "[window]\ncenter = 0\nhalfwidth = 0.6\nnu = 8\n"
             "[trace]\nc = 0.5\np = 20, 30\n");
  CHECK(run({"trace", "--config", cfg, "--out", tmp.str("out")}) == 0);
  const auto rows = read_csv(tmp.str("out/traces.csv"));
  REQUIRE(rows.size() == 3);

  const WindowFunction win(0.0, 0.6, 8);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const int p = std::stoi(rows[i][0]);
    cplx want = 0.0;
    for (int k = 0; k <= p; ++k)  // exact spectrum {k/p}
      want += win.transform(p * (double(k) / p - 0.5));
    CHECK(std::stod(rows[i][1]) == doctest::Approx(want.real()).epsilon(1e-11));
    CHECK(std::abs(std::stod(rows[i][2]) - want.imag()) < 1e-11);
  }
}

TEST_CASE("evolve exports a coherent-state profile") {
  TempDir tmp("btq-cli-evolve");
  const std::string cfg = tmp.str("e.cfg");
  write_file(cfg,
             "[geometry]\nfactors = 1\ntwist = 0\n"
             "[hamiltonian]\npreset = rotation\n"
             "[evolve]\np = 16\nt = 0.25\nu0 = 0.5\ntheta0 = 0\nsign = 1\n");
  CHECK(run({"evolve", "--config", cfg, "--out", tmp.str("out")}) == 0);
  const auto rows = read_csv(tmp.str("out/profile.csv"));
  REQUIRE(rows.size() > 100);
  CHECK(rows[0] == std::vector<std::string>{"x_re", "x_im", "chart", "value_re",
                                            "value_im", "pointwise_norm"});
  // profile norms are consistent with the stored complex values
  const double re = std::stod(rows[5][3]), im = std::stod(rows[5][4]);
  CHECK(std::stod(rows[5][5]) == doctest::Approx(std::hypot(re, im)).epsilon(1e-12));

  // two factors cannot be exported as a planar profile
  write_file(cfg,
             "[geometry]\nfactors = 2\n"
             "[evolve]\np = 8\nt = 0.1\nu0 = 0.5\ntheta0 = 0\n");
  CHECK(run({"evolve", "--config", cfg, "--out", tmp.str("out2")}) == 2);
}

TEST_CASE("gutzwiller pipeline on the linear product model") {
  TempDir tmp("btq-cli-gutz");
  const std::string cfg = tmp.str("g.cfg");
  write_file(cfg,
             "[geometry]\nfactors = 2\ntwist = -1\n"
             "[hamiltonian]\npreset = product:1,1.4142135623730951\n"
             "[window]\ncenter = 1.0606601717798212\nhalfwidth = 0.7\nnu = 8\n"
             "[trace]\nc = 1.2\np = 40..200:10\n"
             "[gutzwiller]\nrmax = 1\n");
  CHECK(run({"gutzwiller", "--config", cfg, "--out", tmp.str("out"), "--jobs", "2"}) == 0);

  const auto orbits = read_csv(tmp.str("out/orbits.csv"));
  REQUIRE(orbits.size() == 5);  // header + m=1,2 for each of two circles
  CHECK(orbits[0][0] == "level");
  for (std::size_t i = 1; i < orbits.size(); ++i) {
    CHECK(std::stod(orbits[i][0]) == doctest::Approx(1.2));
    CHECK(orbits[i][5] == "1");  // all nondegenerate
  }

  const auto traces = read_csv(tmp.str("out/traces.csv"));
  REQUIRE(traces.size() == 18);

  const auto fits = read_csv(tmp.str("out/fits.csv"));
  REQUIRE(fits.size() == 1 + 4 * 2);  // 4 terms, powers 0 and 1
  CHECK(fits[0] == std::vector<std::string>{"term_id", "alpha", "lambda", "coeff_re",
                                            "coeff_im", "residual"});
  // the p^0 coefficient magnitude approximates the orbit-sum amplitude
  //   g(t_m) T / sqrt(4 sin^2(pi m / sqrt 2)), T = 1/sqrt(2)
  const WindowFunction win(1.0606601717798212, 0.7, 8);
  const double w2 = std::sqrt(2.0);
  int matched = 0;
  for (std::size_t i = 1; i < fits.size(); ++i) {
    if (fits[i][1] != "0") continue;  // look at alpha = 0 rows only
    const double mag = std::hypot(std::stod(fits[i][3]), std::stod(fits[i][4]));
    for (int m = 1; m <= 2; ++m) {
      const double amp =
          win.value(m / w2) / w2 / (2.0 * std::abs(std::sin(kPi * m / w2)));
      if (std::abs(mag - amp) < 0.05 * amp) ++matched;
    }
  }
  CHECK(matched == 4);
}

TEST_CASE("check verb: named subset and unknown names") {
  TempDir tmp("btq-cli-check");
  const std::string cfg = tmp.str("c.cfg");
  write_file(cfg, "[check]\nnames = dimensions\n");
  CHECK(run({"check", "--config", cfg, "--out", tmp.str("out")}) == 0);
  const auto rows = read_csv(tmp.str("out/checks.csv"));
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0] == std::vector<std::string>{"name", "measured", "predicted",
                                            "rel_err", "verdict"});
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][4] == "pass");

  write_file(cfg, "[check]\nnames = not-a-check\n");
  CHECK(run({"check", "--config", cfg, "--out", tmp.str("out2")}) == 2);
}

TEST_CASE("spectral cache: reuse, env override, gc") {
  TempDir tmp("btq-cli-cache");
  const std::string cfg = tmp.str("s.cfg");
  write_file(cfg,
             "[geometry]\nfactors = 1\ntwist = 0\n"
             "[hamiltonian]\npreset = perturbed\n"
             "[spectrum]\np = 10, 14\n");

  const std::string cdir = tmp.str("cache");
  CHECK(run({"spectrum", "--config", cfg, "--out", tmp.str("a"), "--cache", cdir}) == 0);
  CHECK(count_blobs(cdir) == 2);

  // second run hits the cache and reproduces the same bytes
  CHECK(run({"spectrum", "--config", cfg, "--out", tmp.str("b"), "--cache", cdir}) == 0);
  CHECK(slurp(tmp.str("a/spectrum.csv")) == slurp(tmp.str("b/spectrum.csv")));

  // environment variable supplies the directory when the flag is absent
  const std::string edir = tmp.str("envcache");
  ::setenv("BTQ_CACHE_DIR", edir.c_str(), 1);
  CHECK(run({"spectrum", "--config", cfg, "--out", tmp.str("c")}) == 0);
  ::unsetenv("BTQ_CACHE_DIR");
  CHECK(count_blobs(edir) == 2);
  CHECK(slurp(tmp.str("a/spectrum.csv")) == slurp(tmp.str("c/spectrum.csv")));

  // gc keeps the directory within budget
  CHECK(run({"cache-gc", "--cache", cdir}) == 0);
  CHECK(count_blobs(cdir) == 2);  // default budget evicts nothing
}
