#include "floqscar/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return floqscar::run_cli(argc, argv, std::cout, std::cerr); }
