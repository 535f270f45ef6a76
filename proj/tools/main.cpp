#include <iostream>

#include "relyamabe/cli.hpp"

int main(int argc, char** argv) { return relyamabe::run_cli(argc, argv, std::cout, std::cerr); }
