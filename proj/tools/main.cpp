#include "sirdc/cli.hpp"

int main(int argc, char** argv) { return sirdc::cli::run(argc, argv); }
