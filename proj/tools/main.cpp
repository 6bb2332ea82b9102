#include "experiment.hpp"

int main(int argc, char** argv) { return gincorr::cli::run_cli(argc, argv); }
