#include <unistd.h>

#include <iostream>

#include "ccx/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ccx::cli::run(args, std::cin, std::cout, std::cerr, isatty(STDIN_FILENO) != 0);
}
