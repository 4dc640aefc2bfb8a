#include <iostream>
#include <string>
#include <vector>

#include "kdsqnm/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return kdsqnm::dispatch(args, std::cout, std::cerr);
}
