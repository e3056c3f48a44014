#include <iostream>

#include "rabispec/cli.hpp"

int main(int argc, char** argv) {
    return rabispec::cli::run(argc, argv, std::cout, std::cerr);
}
