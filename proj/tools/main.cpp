#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return dlimit::cli_main(argc, argv, std::cout, std::cerr); }
