// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "loopbench/cli.hpp"

int main(int argc, char** argv) { return loopbench::run_cli(argc, argv, std::cout, std::cerr); }
