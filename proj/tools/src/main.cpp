// main.cpp - qchain command-line entry point

#include <iostream>

#include "qchain_cli/commands.hpp"

int main(int argc, char** argv)
{
    return qchain::cli::run(argc, argv, std::cout, std::cerr);
}
