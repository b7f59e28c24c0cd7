#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ntdist::kloosterman {

inline constexpr std::int64_t kMaxModulus = 10'000'000;

/// Deterministic Miller-Rabin with the first nine prime bases, exact for n < 3.8e18.
bool is_prime(std::uint64_t n);

/// Inverses of all units modulo c by batch (Montgomery) inversion; entry x is
/// 0 when gcd(x, c) > 1.
std::vector<std::uint32_t> unit_inverses(std::uint32_t c);

/// S(a, b; c) = sum over units x mod c of cos(2 pi (x a + x^{-1} b) / c).
/// Pairing x with -x makes the sum real, so only cosines are accumulated.
double kloosterman_sum(std::int64_t a, std::int64_t b, std::int64_t c);

/// S(a, b; p) / sqrt(p) for prime p.
double kl2(std::int64_t a, std::int64_t b, std::int64_t p);

/// S(1, m; p) for m = 0..p-1. For p not dividing a, S(a, b; p) = S(1, ab; p).
class KloostermanTable {
 public:
  explicit KloostermanTable(std::uint32_t p);

  std::uint32_t p() const noexcept { return p_; }
  /// S(a, b; p), any integers a, b.
  double sum(std::int64_t a, std::int64_t b) const;
  double kl2(std::int64_t a, std::int64_t b) const;
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::uint32_t p_;
  double inv_sqrt_p_;
  std::vector<double> values_;
};

/// (1/(p-1)) sum_{1 <= a < p} Kl2(a, m; p) Kl2(a, n; p).
double orthogonality_average(std::int64_t p, std::int64_t m, std::int64_t n);
double orthogonality_average(const KloostermanTable& table, std::int64_t m, std::int64_t n);

/// Closed forms for p not dividing mn: 1 - 1/(p(p-1)) when m = n mod p,
/// -(p+1)/(p(p-1)) otherwise.
double orthogonality_closed_form(std::int64_t p, std::int64_t m, std::int64_t n);

}  // namespace ntdist::kloosterman
