#include <iostream>
#include <string>
#include <vector>

#include "miss_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return miss::cli::Run(args, std::cout, std::cerr);
}
