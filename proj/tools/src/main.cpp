#include <iostream>

#include "bellcav_app/cli.hpp"

int main(int argc, char** argv)
{
    return bellcav::app::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
