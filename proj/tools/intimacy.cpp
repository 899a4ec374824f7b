#include <iostream>

#include "intimacy/cli.hpp"

int main(int argc, char** argv) { return intimacy::run_cli(argc, argv, std::cout, std::cerr); }
