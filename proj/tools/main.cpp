#include "cli.hpp"

int main(int argc, char** argv) { return iconcap::cli::run(argc, argv); }
