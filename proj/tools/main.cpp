#include "addivortes/cli.hpp"

int main(int argc, char** argv) { return addivortes::run_cli(argc, argv); }
