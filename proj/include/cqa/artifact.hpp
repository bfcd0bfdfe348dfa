#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "json.hpp"

namespace cqa {

// Every file the pipeline writes starts with one line
//   # manifest {...json...}
// naming the command, its effective configuration, seeds and the hashes of the
// inputs it consumed. Readers skip lines that start with '#'.
using Manifest = nlohmann::ordered_json;

inline constexpr std::string_view kManifestPrefix = "# manifest ";

void write_manifest_line(std::ostream& out, const Manifest& manifest);

// Returns the manifest of an artifact, or nullopt when the file has none.
std::optional<Manifest> read_manifest(const std::filesystem::path& path);

// 64-bit FNV-1a of the file contents, as 16 hex digits.
std::string hash_file(const std::filesystem::path& path);

// Opens `path` for writing (creating parent directories); throws DataError on failure.
std::ofstream open_output(const std::filesystem::path& path);
std::ifstream open_input(const std::filesystem::path& path);

// Reads the next line that is not a '#' comment; false at end of stream.
bool next_data_line(std::istream& in, std::string& line);

}  // namespace cqa
