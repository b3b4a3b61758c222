#include "sqnf/cli.hpp"

int main(int argc, char** argv) { return sqnf::cli_main(argc, argv); }
