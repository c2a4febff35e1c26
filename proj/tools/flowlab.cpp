#include <iostream>
#include <string>
#include <vector>

#include "flowlab/cli.hpp"

int main(int argc, char** argv) {
    return flowlab::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
