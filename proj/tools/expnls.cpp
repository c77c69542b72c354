#include "expnls/cli/commands.hpp"

int main(int argc, char** argv) { return expnls::cli::run_cli(argc, argv); }
