#include <iostream>
#include <vector>

#include "skeinforge/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return skf::run_cli(args, std::cout, std::cerr);
}
