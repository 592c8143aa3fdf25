#include <iostream>

#include "deepspace/cli.hpp"

int main(int argc, char** argv) { return deepspace::cli::run(argc, argv, std::cout, std::cerr); }
