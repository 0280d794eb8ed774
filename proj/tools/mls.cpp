#include <unistd.h>

#include <iostream>

#include "mls/cli.hpp"

int main(int argc, char** argv) {
  return mls::cli::main(argc, argv, std::cin, std::cout, std::cerr, isatty(STDIN_FILENO) != 0);
}
