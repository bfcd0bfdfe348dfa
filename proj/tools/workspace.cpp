#include "workspace.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "cqa/error.hpp"

namespace cqa::cli {

void Workspace::require(const fs::path& artifact, const std::string& stage) const {
  if (!fs::exists(artifact)) {
    throw DataError("missing " + relative(artifact) + ": run `cqa " + stage + "` first");
  }
  const auto manifest = read_manifest(artifact);
  if (!manifest || !manifest->contains("inputs")) return;
  for (const auto& [name, hash] : manifest->at("inputs").items()) {
    if (name.starts_with("dump/") || name.starts_with("file:")) continue;  // outside the workspace
    const auto input = root / name;
    if (!fs::exists(input) || hash_file(input) != hash.get<std::string>()) {
      throw DataError("stale " + relative(artifact) + ": " + name + " changed since it was built; re-run `cqa " +
                      stage + "`");
    }
  }
}

Manifest Workspace::hashes(const std::vector<fs::path>& files) const {
  Manifest out = Manifest::object();
  for (const auto& f : files) out[relative(f)] = hash_file(f);
  return out;
}

WorkspaceLock::WorkspaceLock(const fs::path& root) : path_(root / ".lock") {
  fs::create_directories(root);
  const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    if (errno == EEXIST) {
      throw DataError("workspace is locked by " + path_.string() +
                      "; another cqa command is running, or remove the file after a crash");
    }
    throw DataError("cannot create " + path_.string() + ": " + std::strerror(errno));
  }
  const auto pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] const auto n = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

WorkspaceLock::~WorkspaceLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

bool up_to_date(const std::vector<fs::path>& artifacts, const Manifest& manifest) {
  for (const auto& a : artifacts) {
    if (!fs::exists(a)) return false;
    const auto m = read_manifest(a);
    if (!m || *m != manifest) return false;
  }
  return true;
}

}  // namespace cqa::cli
