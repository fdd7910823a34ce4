#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return accum::cli::run(argc, argv, std::cout, std::cerr); }
