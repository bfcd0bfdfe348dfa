#include "cqa/user_features.hpp"

#include <limits>

namespace cqa {

UserFeatureVector UserFeatureVector::all_missing() {
  UserFeatureVector v;
  v.missing.set();
  return v;
}

std::array<double, UserFeatureVector::kCount> UserFeatureVector::with_nan() const {
  auto out = values;
  for (std::size_t i = 0; i < kCount; ++i) {
    if (missing[i]) out[i] = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

UserFeatureVector user_vector(const std::optional<Id>& user, const UserIndex& users) {
  if (!user) return UserFeatureVector::all_missing();
  const auto it = users.find(*user);
  if (it == users.end()) return UserFeatureVector::all_missing();
  const User& u = it->second;
  UserFeatureVector v;
  v.values = {static_cast<double>(u.reputation),    static_cast<double>(u.bronze),
              static_cast<double>(u.silver),        static_cast<double>(u.gold),
              static_cast<double>(u.q_count),       static_cast<double>(u.a_count),
              static_cast<double>(u.up_vote_count), static_cast<double>(u.down_vote_count),
              static_cast<double>(u.view_count),    u.accept_rate.value_or(0.0)};
  v.missing[9] = !u.accept_rate.has_value();
  return v;
}

UserFeatureVector extract_answerer(const Post& answer, const UserIndex& users) {
  return user_vector(answer.owner, users);
}

UserFeatureVector extract_questioner(const Thread& thread, const UserIndex& users) {
  return user_vector(thread.question.owner, users);
}

UserFeatureVector difference_features(const UserFeatureVector& questioner, const UserFeatureVector& answerer) {
  UserFeatureVector d;
  d.missing = questioner.missing | answerer.missing;
  for (std::size_t i = 0; i < UserFeatureVector::kCount; ++i) {
    d.values[i] = d.missing[i] ? 0.0 : questioner.values[i] - answerer.values[i];
  }
  return d;
}

}  // namespace cqa
