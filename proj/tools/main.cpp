#include "treeprof/cli.hpp"

int main(int argc, char** argv) { return treeprof::cli_main(argc, argv); }
