#include <iostream>

#include "nijlin/cli/cli.hpp"

int main(int argc, char** argv) { return nijlin::cli::run(argc, argv, std::cout, std::cerr); }
