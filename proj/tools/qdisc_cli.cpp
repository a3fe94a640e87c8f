#include <iostream>
#include <string>
#include <vector>

#include "qdisc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qdisc::run(args, std::cout, std::cerr);
}
