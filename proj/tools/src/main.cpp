#include <iostream>

#include "panelfuse_cli/commands.hpp"

int main(int argc, char** argv) {
    return panelfuse::cli::run_cli(argc, argv, std::cout, std::cerr);
}
