#include <iostream>
#include <string>
#include <vector>

#include "weenie/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return weenie::run_cli(args, std::cout, std::cerr);
}
