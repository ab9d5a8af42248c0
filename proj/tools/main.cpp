#include "sublex/run.hpp"

int main(int argc, char** argv) { return sublex::run_cli(argc, argv); }
