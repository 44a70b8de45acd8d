#include "feedkit/manifest.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>

#include "feedkit/errors.hpp"
#include "feedkit/hash.hpp"

namespace feedkit {

void RunManifest::add_input(const std::string& path) {
  inputs.emplace_back(path, hex64(hash_file(path)));
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json ins = nlohmann::json::array();
  for (const auto& [path, digest] : inputs)
    ins.push_back({{"path", path}, {"fnv1a64", digest}});
  return nlohmann::json{{"command", command},     {"argv", argv},
                        {"seed", seed},           {"jobs", jobs},
                        {"out_dir", out_dir},     {"inputs", ins},
                        {"outputs", outputs},     {"timestamp_utc", timestamp_utc},
                        {"tool_version", tool_version}};
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  RunManifest m = manifest;
  if (m.timestamp_utc.empty()) {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    m.timestamp_utc = buf;
  }
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw InputError("cannot write " + tmp);
    out << m.to_json().dump(2) << "\n";
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw InputError("cannot move manifest into place at " + path);
}

}  // namespace feedkit
