#include "eamac/cli.hpp"

int main(int argc, char** argv) { return eamac::cli::main_entry(argc, argv); }
