#include <iostream>

#include "peskin/cli.hpp"

int main(int argc, char** argv) { return peskin::cli::main_entry(argc, argv, std::cout, std::cerr); }
