#include <iostream>
#include <string>
#include <vector>

#include "cfair/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return cfair::cli::run(args, std::cout, std::cerr);
}
