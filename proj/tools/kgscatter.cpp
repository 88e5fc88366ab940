#include <iostream>

#include "kgscatter/cli.hpp"

int main(int argc, char** argv) { return kgscatter::cli::run(argc, argv, std::cout, std::cerr); }
