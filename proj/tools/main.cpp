#include "app.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return fit2::cli::run_cli(argc, argv, std::cout, std::cerr);
}
