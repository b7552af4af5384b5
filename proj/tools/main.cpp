#include <iostream>

#include "wavelab/cli.hpp"

int main(int argc, char** argv) { return wavelab::cli_main(argc, argv, std::cout, std::cerr); }
