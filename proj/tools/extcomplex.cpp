#include "extcomplex/cli.hpp"

int main(int argc, char** argv) { return extcomplex::cli::run(argc, argv); }
