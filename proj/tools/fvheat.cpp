// fvheat: command-line entry point

#include <iostream>

#include "fvheat/commands.hpp"

int main(int argc, char** argv) { return fvheat::cli::run_cli(argc, argv, std::cout, std::cerr); }
