#include "cli.hpp"

int main(int argc, char** argv) { return fkg::cli::main_entry(argc, argv); }
