#include "garner_cli/cli.hpp"

int main(int argc, char** argv) { return garner::cli::run_cli(argc, argv); }
