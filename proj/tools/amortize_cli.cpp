#include "amortize/app/cli.hpp"
#include "amortize/runtime.hpp"

#include <iostream>

int main(int argc, char** argv) {
    amortize::tune_allocator();
    return amortize::app::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
