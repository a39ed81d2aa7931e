#include <iostream>

#include "stratvar/cli.hpp"

int main(int argc, char** argv) { return stratvar::cli::run(argc, argv, std::cout, std::cerr); }
