#include <iostream>

#include "trajclust/cli.hpp"

int main(int argc, char** argv) { return trajclust::run_cli(argc, argv, std::cout, std::cerr); }
