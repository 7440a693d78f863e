#include <ios>
#include <iostream>

#include "domainrisk/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return drisk::run_cli(argc, argv);
}
