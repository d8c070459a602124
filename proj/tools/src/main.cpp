#include <iostream>

#include "orbitqsl_cli/commands.hpp"

int main(int argc, char** argv) { return orbitqsl::cli::run(argc, argv, std::cout, std::cerr); }
