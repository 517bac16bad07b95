#include <iostream>

#include "transdyn/cli.hpp"

int main(int argc, char** argv) { return transdyn::cli::main(argc, argv, std::cout, std::cerr); }
