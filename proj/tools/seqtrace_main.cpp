#include <iostream>

#include "seqtrace/cli.hpp"

int main(int argc, char** argv) { return seqtrace::run_cli(argc, argv, std::cout, std::cerr); }
