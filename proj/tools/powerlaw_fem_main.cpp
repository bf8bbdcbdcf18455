#include "plfem/cli_io.hpp"

int main(int argc, char** argv) { return plfem::run_cli(argc, argv); }
