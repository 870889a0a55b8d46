#include "oro/cli.hpp"

int main(int argc, char** argv) { return oro::run_cli(argc, argv); }
