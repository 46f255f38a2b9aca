#include "filcol/cli.hpp"

int main(int argc, char** argv) { return filcol::cli::main_entry(argc, argv); }
