#include <iostream>

#include "vulnprio/cli/app.hpp"

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    const std::vector<std::string> args(argv + 1, argv + argc);
    return vulnprio::cli::run(args, std::cin, std::cout, std::cerr);
}
