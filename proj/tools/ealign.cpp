#include "ealign/cli.hpp"

int main(int argc, char** argv) { return ealign::run_cli(argc, argv); }
