#include <string>
#include <vector>

#include "sixday/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return sixday::cli::run_cli(args);
}
