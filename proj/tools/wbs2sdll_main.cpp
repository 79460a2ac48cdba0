#include "wbs2sdll/cli.hpp"

int main(int argc, char** argv) { return wbs2sdll::run_cli(argc, argv); }
