#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace obtune {

// FNV-1a, 64-bit. Stable across platforms. Used for space and artifact
// digests; nothing adversarial depends on it.
inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t h = 0xCBF29CE484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64_u64(std::uint64_t value, std::uint64_t h) {
  char buf[8];
  std::memcpy(buf, &value, 8);
  return fnv1a64(std::string_view(buf, 8), h);
}

inline std::uint64_t fnv1a64_double(double value, std::uint64_t h) {
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  return fnv1a64_u64(bits, h);
}

inline std::string to_hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

}  // namespace obtune
