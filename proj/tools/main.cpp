#include <iostream>

#include "fpsys_cli.hpp"

int main(int argc, char** argv) {
    return fpsys::cli::run(argc, argv, std::cout, std::cerr);
}
