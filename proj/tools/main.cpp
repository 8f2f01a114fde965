#include <vector>

#include "socsim/cli/cli.hpp"

int main(int argc, char** argv) {
    return socsim::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
