#include "sld/cli.hpp"

int main(int argc, char** argv) { return sld::cli::run_cli(argc, argv); }
