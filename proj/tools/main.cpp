#include <iostream>

#include "scramble/cli.hpp"

int main(int argc, char** argv) { return scramble::cli::run(argc, argv, std::cout, std::cerr); }
