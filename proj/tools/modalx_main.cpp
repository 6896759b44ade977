#include <iostream>

#include "modalx/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return modalx::cli::run(args, std::cout, std::cerr);
}
