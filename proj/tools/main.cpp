#include <iostream>

#include "kvariates/cli.hpp"

int main(int argc, char** argv) { return kvariates::dispatch(argc, argv, std::cout, std::cerr); }
