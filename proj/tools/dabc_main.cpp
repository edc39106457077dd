#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <unistd.h>

#include "dabc/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const bool color = std::getenv("DABC_NO_COLOR") == nullptr && isatty(STDERR_FILENO);
  return dabc::cli::run(args, std::cout, std::cerr, color);
}
