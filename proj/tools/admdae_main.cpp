#include "admdae/cli.hpp"

int main(int argc, char** argv) { return admdae::cli_main(argc, argv); }
