#include "hidescan/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hidescan::app::run_cli(args);
}
