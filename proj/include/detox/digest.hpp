#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace detox {

inline uint64_t fnv1a64(std::string_view data) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// 16-hex-character content digest used to tie result files to their source.
inline std::string source_digest(std::string_view source) {
  static const char* hex = "0123456789abcdef";
  uint64_t h = fnv1a64(source);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace detox
