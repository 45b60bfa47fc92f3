// SPDX-License-Identifier: MIT
//
// Acceptance gate: runs every named check in canonical order and prints one
// pass/fail line per criterion plus the measured/predicted rows behind it.
// The stretch criterion reports but does not gate the exit code.

#include <cstdio>
#include <exception>
#include <string>

#include "btq/checks.hpp"

int main() {
  const auto names = btq::check_names();
  bool failed = false;
  int index = 0;
  for (const std::string& name : names) {
    ++index;
    try {
      const btq::CheckReport rep = btq::run_check(name);
      const bool ok = rep.pass();
      std::printf("[%s] criterion-%d %s: %s\n", ok ? "PASS" : "FAIL", index,
                  rep.criterion.c_str(), rep.description.c_str());
      for (const auto& r : rep.results)
        std::printf("    %-28s measured=%-.10g predicted=%-.10g err=%.3g tol=%.3g %s\n",
                    r.name.c_str(), r.measured, r.predicted, r.rel_err,
                    r.tolerance, r.pass ? "ok" : "FAIL");
      if (!ok) {
        if (rep.blocking)
          failed = true;
        else
          std::printf("    (non-blocking criterion; reported but not gating)\n");
      }
      std::fflush(stdout);
    } catch (const std::exception& e) {
      std::printf("[FAIL] criterion-%d %s: exception: %s\n", index, name.c_str(),
                  e.what());
      if (name != "bochner-gap") failed = true;
      std::fflush(stdout);
    }
  }
  return failed ? 1 : 0;
}
