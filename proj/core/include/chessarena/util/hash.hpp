#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace chessarena::util {

constexpr std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v);

/// Short stable digest used for prompt fingerprints and content addressed ids.
inline std::string digest(std::string_view data) { return hex64(fnv1a64(data)); }

}  // namespace chessarena::util
