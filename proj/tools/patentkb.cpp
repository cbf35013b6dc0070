#include <iostream>

#include "patentkb/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return patentkb::cli::run(args, std::cout, std::cerr);
}
