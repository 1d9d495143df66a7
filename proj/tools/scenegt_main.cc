#include <iostream>
#include <string>
#include <vector>

#include "scenegt/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return scenegt::cli::Run(args, std::cout, std::cerr);
}
