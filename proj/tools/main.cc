#include <iostream>

#include "invsfm/cli.h"

int main(int argc, char** argv) { return invsfm::run_cli(argc, argv, std::cout, std::cerr); }
