#include "cli.hpp"

int main(int argc, char** argv) { return analytica::cli::run(argc, argv); }
