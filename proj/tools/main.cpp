#include "chatlens/cli.hpp"

int main(int argc, char** argv) { return chatlens::cli::run(argc, argv); }
