#include <iostream>
#include <string>
#include <vector>

#include "bohrlat/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bohrlat::cli::run(std::move(args), std::cout, std::cerr);
}
