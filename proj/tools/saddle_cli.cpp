#include "saddle/harness.hpp"

int main(int argc, char** argv) { return saddle::cli_main(argc, argv); }
