#include <iostream>
#include <string>
#include <vector>

#include "causelog/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return causelog::cli::run(args, std::cout, std::cerr);
}
