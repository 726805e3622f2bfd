#include "fracproj/cli.hpp"

int main(int argc, char** argv) { return fracproj::cli::main_entry(argc, argv); }
