#include "otnet/cli.hpp"

int main(int argc, char** argv) { return otnet::cli::main(argc, argv); }
