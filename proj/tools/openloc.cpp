#include <iostream>

#include "openloc/cli.hpp"

int main(int argc, char** argv) { return openloc::cli::run(argc, argv, std::cout, std::cerr); }
