// oqsim_main.cpp — CLI entry point.

#include "oqs/cli.hpp"

int main(int argc, char** argv) {
    return oqs::cli::run(argc, argv);
}
