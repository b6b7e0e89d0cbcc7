#include <iostream>

#include "streamscreen/commands.hpp"

int main(int argc, char** argv) {
  return streamscreen::run_cli(argc, argv, std::cout, std::cerr);
}
