#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cqa/artifact.hpp"

namespace cqa::cli {

namespace fs = std::filesystem;

// Fixed layout under the workspace root.
struct Workspace {
  fs::path root;

  fs::path dataset_dir() const { return root / "dataset"; }
  fs::path lda_model() const { return root / "lda" / "model.txt"; }
  fs::path coherence_csv() const { return root / "lda" / "coherence.csv"; }
  fs::path features_csv() const { return root / "features" / "features.csv"; }
  fs::path user_graph() const { return root / "features" / "user_graph.txt"; }
  fs::path runs_dir() const { return root / "runs"; }
  fs::path run_dir(const std::string& id) const { return runs_dir() / id; }
  fs::path reports_dir() const { return root / "reports"; }

  std::string relative(const fs::path& p) const { return p.lexically_relative(root).generic_string(); }

  // Fails with DataError naming `stage` when `artifact` does not exist, or
  // when one of the workspace inputs recorded in its manifest has changed.
  void require(const fs::path& artifact, const std::string& stage) const;

  // {"<relative path>": "<hash>"} for the given workspace files.
  Manifest hashes(const std::vector<fs::path>& files) const;
};

// Exclusive writer lock: a `.lock` file created with O_EXCL, removed on
// destruction. A stale lock from a crashed run must be removed by hand.
class WorkspaceLock {
 public:
  explicit WorkspaceLock(const fs::path& root);
  ~WorkspaceLock();
  WorkspaceLock(const WorkspaceLock&) = delete;
  WorkspaceLock& operator=(const WorkspaceLock&) = delete;

 private:
  fs::path path_;
};

// True when every artifact exists and carries exactly `manifest`.
bool up_to_date(const std::vector<fs::path>& artifacts, const Manifest& manifest);

}  // namespace cqa::cli
