#include <string>
#include <vector>

#include "aboveavg/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return aboveavg::cli::run(args);
}
