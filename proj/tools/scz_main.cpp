#include <iostream>

#include "scz/cli.hpp"

int main(int argc, char** argv) { return scz::cli_dispatch(argc, argv, std::cout, std::cerr); }
