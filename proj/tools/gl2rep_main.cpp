#include "gl2rep/cli_app.hpp"

int main(int argc, char** argv) { return gl2rep::cli::run(argc, argv); }
