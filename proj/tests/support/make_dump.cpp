// Writes a synthetic Stack Exchange dump: make_dump <dir> [questions] [seed]
#include <cstdlib>
#include <iostream>

#include "support/synthetic_dump.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_dump <dir> [questions] [seed]\n";
    return 2;
  }
  cqa::test::SyntheticDumpSpec spec;
  if (argc > 2) spec.questions = std::atoi(argv[2]);
  if (argc > 3) spec.seed = std::strtoull(argv[3], nullptr, 10);
  std::filesystem::create_directories(argv[1]);
  cqa::test::write_synthetic_dump(argv[1], spec);
  return 0;
}
