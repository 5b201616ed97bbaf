#include <iostream>

#include "attnalloc/cli.hpp"

int main(int argc, char** argv) { return attnalloc::cli_main(argc, argv, std::cout, std::cerr); }
