#include <iostream>

#include "heatlab/cli.hpp"

int main(int argc, char** argv) { return heatlab::cli::main_entry(argc, argv, std::cout, std::cerr); }
