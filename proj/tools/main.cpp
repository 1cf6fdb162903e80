#include "it2pf/cli.hpp"

int main(int argc, char** argv) { return it2pf::cli_dispatch(argc, argv); }
