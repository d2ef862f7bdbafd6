#include <iostream>

#include "limase/cli.hpp"

int main(int argc, char** argv) { return limase::cli::run(argc, argv, std::cout, std::cerr); }
