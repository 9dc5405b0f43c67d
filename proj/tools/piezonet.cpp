#include "piezonet/cli.hpp"

int main(int argc, char** argv) { return piezonet::run_command(argc, argv); }
