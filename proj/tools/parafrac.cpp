#include <iostream>

#include "parafrac/cli.hpp"

int main(int argc, char** argv) {
  return parafrac::cli::run(argc, argv, std::cout, std::cerr);
}
