#pragma once

#include <array>
#include <bitset>
#include <string_view>

#include "cqa/corpus.hpp"

namespace cqa {

// Profile statistics of one user. A set bit in `missing` means the value is
// unavailable (anonymous author, unknown user, or no answers for accept_rate).
struct UserFeatureVector {
  static constexpr std::size_t kCount = 10;
  static constexpr std::array<std::string_view, kCount> kNames{
      "reputation", "bronze",        "silver",          "gold",       "q_count",
      "a_count",    "up_vote_count", "down_vote_count", "view_count", "accept_rate"};

  std::array<double, kCount> values{};
  std::bitset<kCount> missing;

  static UserFeatureVector all_missing();
  // Values with NaN in missing slots.
  std::array<double, kCount> with_nan() const;
};

UserFeatureVector user_vector(const std::optional<Id>& user, const UserIndex& users);
UserFeatureVector extract_answerer(const Post& answer, const UserIndex& users);
UserFeatureVector extract_questioner(const Thread& thread, const UserIndex& users);

// questioner - answerer per field; missing if either side is missing.
UserFeatureVector difference_features(const UserFeatureVector& questioner, const UserFeatureVector& answerer);

}  // namespace cqa
