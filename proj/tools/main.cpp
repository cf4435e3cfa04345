#include <iostream>

#include "mfbog/cli.h"

int main(int argc, char** argv) { return mfbog::run_cli(argc, argv, std::cout, std::cerr); }
