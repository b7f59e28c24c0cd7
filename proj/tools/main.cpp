#include "cli.hpp"

int main(int argc, char** argv) {
  return ntdist::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
