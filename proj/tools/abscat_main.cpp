#include "abscat/cli.hpp"

int main(int argc, char** argv) { return abscat::cli::main_entry(argc, argv); }
