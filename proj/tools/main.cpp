#include <iostream>
#include <string>
#include <vector>

#include "lambdarep/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return lambdarep::run_cli(args, std::cout, std::cerr);
}
