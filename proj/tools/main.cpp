#include "maxprod/cli.hpp"

int main(int argc, char** argv) { return maxprod::cli::run(argc, argv); }
