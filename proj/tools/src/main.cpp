#include "prodsv_cli/cli.hpp"

int main(int argc, char** argv) { return prodsv::cli::main_entry(argc, argv); }
