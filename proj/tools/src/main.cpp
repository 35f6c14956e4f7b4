#include <iostream>

#include "slipform_cli/cli.hpp"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return slipform::cli::run(args, std::cout, std::cerr);
}
