#include <string>
#include <vector>

#include "satotate/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return satotate::cli::run(std::move(args));
}
