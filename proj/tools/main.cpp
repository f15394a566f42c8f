#include "qotto/run_config.hpp"

int main(int argc, char** argv) { return qotto::cli::run_cli(argc, argv); }
