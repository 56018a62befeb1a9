#include <iostream>

#include "modsel/cli.hpp"

int main(int argc, char** argv) {
  return modsel::cli_main(argc, argv, std::cout, std::cerr);
}
