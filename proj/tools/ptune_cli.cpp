#include "ptune/commands.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return ptune::run_cli(argc, argv, std::cout, std::cerr);
}
