#include "covset/experiments.hpp"

int main(int argc, char** argv) { return covset::cli_main(argc, argv); }
