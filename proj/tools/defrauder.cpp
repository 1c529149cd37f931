#include <iostream>

#include "defrauder/cli.hpp"

int main(int argc, char** argv) { return defrauder::cli::run(argc, argv, std::cout, std::cerr); }
