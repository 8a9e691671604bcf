#include <iostream>

#include "devpool_cli.hpp"

int main(int argc, char** argv)
{
    return devpool::cli::run(argc, argv, std::cout, std::cerr);
}
