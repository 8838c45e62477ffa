#include "fhn/cli.hpp"

int main(int argc, char** argv) { return fhn::cli::run(argc, argv); }
