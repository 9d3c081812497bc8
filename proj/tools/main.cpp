#include "lobkin/cli.hpp"

int main(int argc, char** argv) { return lobkin::run_cli(argc, argv); }
