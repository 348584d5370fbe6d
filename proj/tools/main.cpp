#include <iostream>

#include "fpdtl/cli.hpp"

int main(int argc, char** argv) {
  return fpdtl::cli::parse_and_dispatch(argc, argv, std::cout, std::cerr);
}
