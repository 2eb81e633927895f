#include "cli.hpp"

int main(int argc, char** argv) { return gensol::cli::run({argv + 1, argv + argc}); }
