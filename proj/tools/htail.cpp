#include "heavytail/cli_io.hpp"

int main(int argc, char** argv) { return heavytail::io::run(argc, argv); }
