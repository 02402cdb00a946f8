#include "cofkit/cli.hpp"

int main(int argc, char** argv) { return cofkit::cli_main(argc, argv); }
