#pragma once

#include <cstdint>
#include <filesystem>

#include "cqa/corpus.hpp"

namespace cqa::test {

// Knobs for a small Stack Exchange style dump. Accepted answers lean towards
// higher scores, earlier posting and more experienced authors, roughly as on a
// real site, so the whole pipeline has some signal to find.
struct SyntheticDumpSpec {
  int questions = 200;
  int users = 80;
  int topics = 5;
  std::uint64_t seed = 1;
  double accepted_rate = 0.85;
  double anonymous_rate = 0.05;
  int max_answers = 7;
};

void write_synthetic_dump(const std::filesystem::path& dir, const SyntheticDumpSpec& spec);

// Fresh empty directory under the test scratch area.
std::filesystem::path scratch_dir(const std::string& name);

Dataset load_dump(const std::filesystem::path& dir);

}  // namespace cqa::test
