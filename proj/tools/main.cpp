#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return geopitch::cli::dispatch(argc, argv, std::cout, std::cerr); }
