#include "ruin/cli.hpp"

int main(int argc, char** argv) { return ruin::cli::main_entry(argc, argv); }
