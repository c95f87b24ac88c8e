#include <iostream>

#include "tailbound/cli.hpp"

int main(int argc, char** argv) {
    return tailbound::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
