#include "smalldiv/cli.hpp"

int main(int argc, char** argv) { return smalldiv::cli::main(argc, argv); }
