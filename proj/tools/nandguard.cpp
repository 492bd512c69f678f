#include <iostream>

#include "nandguard/cli.hpp"

int main(int argc, char** argv) { return nandguard::cli_main(argc, argv, std::cout, std::cerr); }
