#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <string>

namespace ntdist::io {

/// Shortest decimal that round-trips; output never depends on locale.
inline std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

/// Writes text to path through a temporary file and rename.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace ntdist::io
