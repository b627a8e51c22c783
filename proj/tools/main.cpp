#include <iostream>

#include "cli/commands.hpp"

int main(int argc, char** argv) { return abshr::cli::run(argc, argv, std::cout, std::cerr); }
