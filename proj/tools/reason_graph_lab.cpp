#include <iostream>

#include "rgl/commands.hpp"

int main(int argc, char** argv) { return rgl::run_cli(argc, argv, std::cout, std::cerr); }
