#include <iostream>

#include "afw3d/cli.hpp"

int main(int argc, char** argv) { return afw3d::cli_main(argc, argv, std::cout, std::cerr); }
