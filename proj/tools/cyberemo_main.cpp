#include "cyberemo/cli.hpp"

int main(int argc, char** argv) { return cyberemo::cli::run(argc, argv); }
