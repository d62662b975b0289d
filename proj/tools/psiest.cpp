#include <iostream>

#include "psiest/cli.hpp"

int main(int argc, char** argv) {
  return psiest::cli::run(argc, argv, std::cout, std::cerr);
}
