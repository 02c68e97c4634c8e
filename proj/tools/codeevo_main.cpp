#include "codeevo/cli.hpp"

int main(int argc, char** argv) { return codeevo::run_cli(argc, argv); }
