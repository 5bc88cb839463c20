#include <iostream>

#include "lsmc/cli.hpp"

int main(int argc, char** argv) { return lsmc::run_cli(argc, argv, std::cout, std::cerr); }
