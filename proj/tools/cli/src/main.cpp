#include <iostream>

#include "cycle_census_cli/cli.hpp"

int main(int argc, char** argv) { return cycle_census::cli::parse_and_dispatch(argc, argv, std::cout, std::cerr); }
