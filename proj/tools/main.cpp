#include <iostream>
#include <string>
#include <vector>

#include "mcbern/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    const mcbern::CommandResult r = mcbern::run_command(args);
    std::cout << r.out;
    std::cerr << r.err;
    return r.exit_code;
}
