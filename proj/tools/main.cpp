#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv)
{
    return rwre::cli::run_main(argc, argv, std::cerr);
}
