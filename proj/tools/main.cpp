#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return mallows_cli::dispatch(argc, argv, std::cout, std::cerr); }
