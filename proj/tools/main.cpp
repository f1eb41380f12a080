#include <iostream>

#include "conefp/cli.hpp"

int main(int argc, char** argv) { return conefp::cli::run(argc, argv, std::cout, std::cerr); }
