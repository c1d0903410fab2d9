#include "tilq_cli/run.hpp"

#include <iostream>

int main(int argc, char** argv) { return tilq::cli::main_entry(argc, argv, std::cout, std::cerr); }
