#include "cli.hpp"

int main(int argc, char** argv) { return ntk::cli::main(argc, argv); }
