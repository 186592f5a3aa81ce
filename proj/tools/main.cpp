#include "bterm/cli.hpp"

int main(int argc, char** argv) { return bterm::cli::run(argc, argv); }
