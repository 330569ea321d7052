#include "cli.hpp"

int main(int argc, char** argv) { return convexkit::cli::run(argc, argv); }
