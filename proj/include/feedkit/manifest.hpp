#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace feedkit {

// Reproducibility record written atomically next to every command's outputs:
// the command, its resolved arguments and seeds, and content hashes of every
// input file.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  uint64_t seed = 0;
  size_t jobs = 1;
  std::string out_dir;
  std::vector<std::pair<std::string, std::string>> inputs;   // path, fnv1a64 hex
  std::vector<std::string> outputs;
  std::string timestamp_utc;
  std::string tool_version;

  void add_input(const std::string& path);
  nlohmann::json to_json() const;
};

// Writes to a temp file in the target directory, then renames into place.
void write_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace feedkit
