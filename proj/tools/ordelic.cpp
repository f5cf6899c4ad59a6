#include "ordelic/cli.hpp"

int main(int argc, char** argv) { return ordelic::run_cli(argc, argv); }
