// SPDX-License-Identifier: MIT

#pragma once

#include <stdexcept>
#include <string>

namespace btq {

// Bad user input: config files, CLI arguments, mismatched presets.
// The command line tool maps this to exit code 2.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure past a guard: ill-conditioned Gram or fit matrices,
// integrator breakdown, cache corruption that cannot be recovered.
// The command line tool maps this to exit code 3.
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace btq
