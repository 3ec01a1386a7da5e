#include "stellar/cli.hpp"

int main(int argc, char** argv) { return stellar::cli::run(argc, argv); }
