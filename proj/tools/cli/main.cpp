#include "cli.hpp"

int main(int argc, char** argv) { return parcs::cli::run(argc, argv); }
