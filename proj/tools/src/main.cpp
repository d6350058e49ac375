#include <csignal>
#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"

namespace {

extern "C" void on_sigint(int) {
  if (chessarena::cli::stop_flag().exchange(true)) std::_Exit(130);
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_sigint);
  std::signal(SIGTERM, on_sigint);
  return chessarena::cli::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
