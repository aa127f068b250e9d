#include "hebbsim/experiments.hpp"

int main(int argc, char** argv) { return hebbsim::cli_main(argc, argv); }
