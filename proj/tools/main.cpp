#include <iostream>

#include "rankdens/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rankdens::run_cli(args, std::cout, std::cerr);
}
