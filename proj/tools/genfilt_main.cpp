#include <iostream>
#include <string>
#include <vector>

#include "genfilt/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return genfilt::cli::run(args, std::cout, std::cerr);
}
