#include "mbsts/cli.hpp"

int main(int argc, char** argv) { return mbsts::run_cli(argc, argv); }
