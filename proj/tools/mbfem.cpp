#include <iostream>

#include "mbfem/cli.hpp"

int main(int argc, char** argv) { return mbfem::cli::run(argc, argv, std::cout, std::cerr); }
