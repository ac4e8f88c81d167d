#include "emberline/cli.hpp"

int main(int argc, char** argv) { return emberline::cli_main(argc, argv); }
