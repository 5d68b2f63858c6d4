#include "wpd/cli.hpp"

int main(int argc, char** argv) { return wpd::cli::run(argc, argv); }
