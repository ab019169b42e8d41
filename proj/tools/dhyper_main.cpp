#include "dhyper/cli.hpp"

int main(int argc, char** argv) { return dhyper::run_cli(argc, argv); }
