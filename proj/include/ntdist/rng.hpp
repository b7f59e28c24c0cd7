#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace ntdist {

/// Philox4x32-10 counter-based generator. Every (key, counter) pair maps to
/// an independent block of four 32-bit words, so a stream can be addressed
/// by (seed, trial, index) without shared state.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Block operator()(std::uint64_t hi, std::uint64_t lo) const {
    Block ctr{static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(lo >> 32),
              static_cast<std::uint32_t>(hi), static_cast<std::uint32_t>(hi >> 32)};
    std::array<std::uint32_t, 2> key = key_;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
      key[0] += 0x9E3779B9u;
      key[1] += 0xBB67AE85u;
    }
    return ctr;
  }

  /// Uniform double in [0, 1) with 53 random bits, from words 0 and 1.
  double uniform(std::uint64_t hi, std::uint64_t lo) const {
    const Block b = (*this)(hi, lo);
    const std::uint64_t bits = (std::uint64_t{b[0]} << 21) ^ (b[1] >> 11);
    return static_cast<double>(bits & ((std::uint64_t{1} << 53) - 1)) * 0x1.0p-53;
  }

  /// Two uniforms in [0, 1) from one block.
  std::array<double, 2> uniform2(std::uint64_t hi, std::uint64_t lo) const {
    const Block b = (*this)(hi, lo);
    const std::uint64_t u = (std::uint64_t{b[0]} << 21) ^ (b[1] >> 11);
    const std::uint64_t v = (std::uint64_t{b[2]} << 21) ^ (b[3] >> 11);
    constexpr std::uint64_t mask = (std::uint64_t{1} << 53) - 1;
    return {static_cast<double>(u & mask) * 0x1.0p-53, static_cast<double>(v & mask) * 0x1.0p-53};
  }

  /// Standard normal by Box-Muller on one block.
  double normal(std::uint64_t hi, std::uint64_t lo) const {
    const auto [u, v] = uniform2(hi, lo);
    return std::sqrt(-2.0 * std::log1p(-u)) * std::cos(2.0 * std::numbers::pi * v);
  }

 private:
  std::array<std::uint32_t, 2> key_;
};

/// SplitMix64 finalizer, used to derive per-sample seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace ntdist
