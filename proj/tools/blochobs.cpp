#include <iostream>

#include "blochobs/cli.hpp"

int main(int argc, char** argv) { return blochobs::run_cli(argc, argv, std::cout, std::cerr); }
