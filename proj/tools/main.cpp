#include "cli.hpp"

int main(int argc, char** argv) { return slowdiff::cli::main(argc, argv); }
