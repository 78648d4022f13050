#include "cli.hpp"

int main(int argc, char** argv) { return trussnet::cli::run(argc, argv, std::cout, std::cerr); }
