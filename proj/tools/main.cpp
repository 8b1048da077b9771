#include "ontotier/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return ontotier::run_cli(argc, argv, std::cout, std::cerr); }
