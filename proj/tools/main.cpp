#include "lil/cli.hpp"

int main(int argc, char** argv) { return lil::cli::dispatch(argc, argv); }
