#include "cli.hpp"

int main(int argc, char** argv) { return bolab::run_cli(argc, argv); }
