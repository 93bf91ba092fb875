#include "cli.hpp"

int main(int argc, char** argv) { return pcgs::cli::run(argc, argv); }
