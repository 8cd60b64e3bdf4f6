#include <iostream>
#include <string>
#include <vector>

#include "rankfreq/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return rankfreq::run_cli(args, std::cout, std::cerr);
}
