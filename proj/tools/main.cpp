#include "cli.hpp"

int main(int argc, char** argv) { return mca::cli::run(argc, argv); }
