#include "abcem/output.hpp"

int main(int argc, char** argv) { return abcem::cli::run_cli(argc, argv); }
