#include <iostream>
#include <string>
#include <vector>

#include "qpns/harness/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return qpns::harness::run_cli(args, std::cout, std::cerr);
}
