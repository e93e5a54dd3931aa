#include "spe/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return spe::run_cli(std::move(args));
}
