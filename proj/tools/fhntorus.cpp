#include <iostream>
#include <string>
#include <vector>

#include "fhntorus/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return fhntorus::parse_and_dispatch(args, std::cout, std::cerr);
}
