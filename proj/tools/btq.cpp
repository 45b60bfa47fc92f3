// SPDX-License-Identifier: MIT

#include "btq/cli.hpp"

int main(int argc, char** argv) { return btq::run_cli(argc, argv); }
