#pragma once

#include <filesystem>

#include "ntdist/arith.hpp"

namespace ntdist::cache {

/// Flat binary cache: "NTCACHE\0", uint32 version, uint32 k (0 for d(n),
/// the weight for a cusp form), uint64 N, then the arrays. Little-endian.
///   divisor: uint16 d[0..N], uint64 prefix[0..N]
///   hecke:   per n in 0..N an int32 signed byte count, then the magnitude
///            of a(n) as big-endian bytes
inline constexpr std::uint32_t kVersion = 1;

void save(const std::filesystem::path& path, const arith::DivisorTable& t);
void save(const std::filesystem::path& path, const arith::HeckeTable& t);

/// Throw Error on a missing file, wrong magic, version or kind, or a short
/// read; table invariants are revalidated on load.
arith::DivisorTable load_divisor(const std::filesystem::path& path);
arith::HeckeTable load_hecke(const std::filesystem::path& path);

/// Loads the table when the cache holds at least `limit` entries, otherwise
/// builds it and rewrites the cache. An empty path disables caching.
arith::DivisorTable divisor_table(const std::filesystem::path& path, std::uint64_t limit,
                                  std::uint64_t ceiling = arith::kDefaultDivisorCeiling);
arith::HeckeTable hecke_table(const std::filesystem::path& path, std::uint64_t limit,
                              std::uint64_t ceiling = arith::kDefaultHeckeCeiling);

}  // namespace ntdist::cache
