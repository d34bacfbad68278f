#include <iostream>

#include "lathom/cli.hpp"

int main(int argc, char** argv) {
  return lathom::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
