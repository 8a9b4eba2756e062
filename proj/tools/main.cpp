#include "cli.hpp"

int main(int argc, char** argv) { return vfts::cli::main(argc, argv); }
