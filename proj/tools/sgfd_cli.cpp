#include "sgfd/cli.hpp"

int main(int argc, char** argv) { return sgfd::run_cli(argc, argv); }
