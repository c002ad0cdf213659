// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "mcfar/cli/commands.hpp"

int main(int argc, char** argv) { return mcfar::cli::run(argc, argv, std::cout, std::cerr); }
