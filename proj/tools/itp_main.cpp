#include "itp/cli.hpp"

int main(int argc, char** argv) { return itp::cli::run(argc, argv); }
