#include "fastpsf/cli.hpp"

int main(int argc, char** argv) { return fastpsf::run_cli(argc, argv); }
