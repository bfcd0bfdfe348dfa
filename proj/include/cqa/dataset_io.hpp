#pragma once

#include <filesystem>

#include "cqa/artifact.hpp"
#include "cqa/corpus.hpp"

namespace cqa {

// Internal dataset layout, one JSON object per line after the manifest line:
//   posts.jsonl      {"id","kind":"question"|"answer","created_ms","score","owner","accepted","parent","body"}
//   comments.jsonl   {"id","post","author","created_ms","text"}
//   users.jsonl      {"id","reputation","gold","silver","bronze","q_count","a_count",
//                     "up_votes","down_votes","views","accept_rate"}
//   instances.jsonl  {"question","answer","label"}
// Absent optionals are written as null. Only posts/comments of retained
// threads are written.
void write_dataset(const std::filesystem::path& dir, const Dataset& ds, const Manifest& manifest);

// Rebuilds threads and instances from the stored records.
Dataset read_dataset(const std::filesystem::path& dir);

struct DumpStats {
  ParseStats posts, users, comments, badges;
  bool has_badges = false;
};

// Reads Posts.xml, Users.xml and Comments.xml (Badges.xml optional) from an
// extracted dump directory and assembles the labelled dataset, user
// statistics included. A missing required file throws DataError naming it.
Dataset load_dump(const std::filesystem::path& dir, DumpStats* stats = nullptr);

inline constexpr const char* kDatasetFiles[] = {"posts.jsonl", "comments.jsonl", "users.jsonl", "instances.jsonl"};

}  // namespace cqa
