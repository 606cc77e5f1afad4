#include <iostream>

#include "pmr/cli.hpp"

int main(int argc, char** argv) { return pmr::run_cli(argc, argv, std::cout, std::cerr); }
