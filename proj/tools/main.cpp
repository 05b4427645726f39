#include "conceptkit_cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return conceptkit::cli::run(argc, argv, std::cout, std::cerr);
}
