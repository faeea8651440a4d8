#include <iostream>

#include "xmem/commands.hpp"

int main(int argc, char** argv) { return xmem::run_cli(argc, argv, std::cout, std::cerr); }
