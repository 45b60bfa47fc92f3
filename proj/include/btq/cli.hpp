// SPDX-License-Identifier: MIT
//
// Config-driven experiment runner behind the btq tool.
//
// Verbs: quantize, spectrum, evolve, trace, gutzwiller, check, cache-gc.
// Flags: --config <path>, --out <dir>, --cache <dir>, --jobs <n>.
// Exit codes: 0 pass, 1 check failure, 2 config error, 3 numerical failure.

#pragma once

namespace btq {

int run_cli(int argc, char** argv);

}  // namespace btq
