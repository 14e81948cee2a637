#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace hoopdef {

/// FNV-1a 64-bit. Used for stage cache keys and artifact fingerprints;
/// not cryptographic.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xCBF29CE484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Canonical float formatting for hashed/serialized artifacts:
/// 17 significant digits round-trips any double identically everywhere.
inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace hoopdef
