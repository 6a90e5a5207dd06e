#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return dpspin::run_cli(argc, argv, std::cout, std::cerr); }
