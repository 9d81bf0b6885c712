#include "risr/cli.hpp"

int main(int argc, char** argv) { return risr::run_cli(argc, argv); }
