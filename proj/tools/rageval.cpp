#include <iostream>
#include <string>
#include <vector>

#include "rageval/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rageval::run_cli(args, std::cout, std::cerr);
}
