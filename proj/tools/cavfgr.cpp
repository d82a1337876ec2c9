#include "cavfgr/cli.hpp"

int main(int argc, char** argv) { return cavfgr::cli::main(argc, argv); }
