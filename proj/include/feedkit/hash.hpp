#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace feedkit {

inline constexpr uint64_t kFnvOffset64 = 1469598103934665603ULL;
inline constexpr uint64_t kFnvPrime64 = 1099511628211ULL;

inline uint64_t fnv1a64_bytes(const void* data, size_t len, uint64_t h = kFnvOffset64) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= kFnvPrime64;
  }
  return h;
}

inline uint64_t fnv1a64(std::string_view s, uint64_t h = kFnvOffset64) {
  return fnv1a64_bytes(s.data(), s.size(), h);
}

// Stable per-task seed derivation: hash(global seed, tag). Used so that
// parallel workers produce schedule-independent results.
inline uint64_t derive_seed(uint64_t seed, std::string_view tag) {
  uint64_t h = fnv1a64_bytes(&seed, sizeof(seed));
  return fnv1a64(tag, h);
}

std::string hex64(uint64_t v);

// FNV-1a over the raw bytes of a file. Throws InputError if unreadable.
uint64_t hash_file(const std::string& path);

}  // namespace feedkit
