#include <iostream>

#include "qfrac/cli.hpp"

int main(int argc, char** argv) { return qfrac::run_cli(argc, argv, std::cout, std::cerr); }
