#include "mage/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return mage::cli::main_entry(argc, argv, std::cout, std::cerr); }
