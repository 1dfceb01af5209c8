#include <iostream>
#include <string>
#include <vector>

#include "magnon/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return magnon::run_cli(args, std::cout, std::cerr);
}
