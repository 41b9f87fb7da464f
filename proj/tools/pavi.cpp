#include "pavi/cli.hpp"

int main(int argc, char** argv) { return pavi::run_cli(argc, argv); }
