#include <iostream>

#include "cvsim/cli.hpp"

int main(int argc, char** argv) { return cvsim::parse_and_run(argc, argv, std::cout, std::cerr); }
