#include <string>
#include <vector>

#include "ikclust/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ikclust::run_cli(args);
}
