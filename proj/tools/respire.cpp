#include "respire/cli.hpp"

int main(int argc, char** argv) { return respire::cli::run(argc, argv); }
