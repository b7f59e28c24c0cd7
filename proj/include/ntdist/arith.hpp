#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <gmpxx.h>

namespace ntdist::arith {

/// Euler's constant to 17 significant digits.
inline constexpr double kEulerGamma = 0.57721566490153286;

inline constexpr std::uint64_t kDefaultDivisorCeiling = 100'000'000;
inline constexpr std::uint64_t kDefaultHeckeCeiling = 1'000'000;

/// Sieved d(n) for 1 <= n <= limit, with exact prefix sums.
/// Immutable after construction; safe to share across threads.
class DivisorTable {
 public:
  static DivisorTable build(std::uint64_t limit,
                            std::uint64_t ceiling = kDefaultDivisorCeiling);
  /// Wraps arrays read from a cache file; validates the prefix invariant.
  static DivisorTable from_arrays(std::vector<std::uint16_t> values,
                                  std::vector<std::uint64_t> prefix);

  std::uint64_t limit() const noexcept { return values_.size() - 1; }
  std::uint32_t d(std::uint64_t n) const { return values_[n]; }
  /// Sum of d(m) for m <= n; prefix(0) == 0.
  std::uint64_t prefix(std::uint64_t n) const { return prefix_[n]; }

  /// Index 0 is a zero placeholder so that values()[n] == d(n).
  std::span<const std::uint16_t> values() const noexcept { return values_; }
  std::span<const std::uint64_t> prefixes() const noexcept { return prefix_; }

 private:
  DivisorTable() = default;
  std::vector<std::uint16_t> values_;
  std::vector<std::uint64_t> prefix_;
};

/// Exact and normalized Fourier coefficients of the level-1 eigenform of
/// weight 12 (Ramanujan's Delta), normalized so that rho(1) = 1.
class HeckeTable {
 public:
  static HeckeTable build(int weight, std::uint64_t limit,
                          std::uint64_t ceiling = kDefaultHeckeCeiling);
  static HeckeTable from_exact(int weight, std::vector<mpz_class> exact);

  int weight() const noexcept { return weight_; }
  std::uint64_t limit() const noexcept { return exact_.size() - 1; }

  const mpz_class& exact(std::uint64_t n) const { return exact_[n]; }
  /// a(n) / n^{(k-1)/2}
  double rho(std::uint64_t n) const { return normalized_[n]; }
  /// A_f(n) = sum of rho(m) for m <= n.
  double prefix(std::uint64_t n) const { return prefix_[n]; }

  std::span<const mpz_class> exact_values() const noexcept { return exact_; }
  std::span<const double> normalized() const noexcept { return normalized_; }
  std::span<const double> prefixes() const noexcept { return prefix_; }

 private:
  HeckeTable() = default;
  void normalize();

  int weight_ = 12;
  std::vector<mpz_class> exact_;
  std::vector<double> normalized_;
  std::vector<double> prefix_;
};

/// Coefficients of q * prod (1 - q^n)^24 up to q^limit, by squaring the
/// eta^3 series three times with Kronecker substitution. Index 0 is zero.
std::vector<mpz_class> ramanujan_tau(std::uint64_t limit);

struct SummatoryRemainder {
  double x = 0.0;
  std::uint64_t exact_sum = 0;
  double main_term = 0.0;
  double remainder = 0.0;
};

/// Sum of d(n) for n <= floor(x) by the hyperbola method in O(sqrt x).
/// Returns 0 for x < 1.
std::uint64_t divisor_summatory(double x);
std::uint64_t divisor_summatory(std::uint64_t n);

/// Delta(x) = D(x) - x (log x + 2 gamma - 1).
SummatoryRemainder delta_remainder(double x);

/// Sum of d(n)^2 for n <= t, read from the sieve.
std::uint64_t d2_summatory(const DivisorTable& table, double t);

struct PolyLogFit {
  /// Coefficients a3, a2, a1, a0 of t (a3 L^3 + a2 L^2 + a1 L + a0), L = log t.
  double a3 = 0.0, a2 = 0.0, a1 = 0.0, a0 = 0.0;
};

/// Least-squares fit of the d^2 summatory function; see fit_c3.
PolyLogFit fit_d2_polylog(const DivisorTable& table, std::span<const double> t_grid);

/// Leading coefficient of the d^2 summatory fit, an estimate of 1/pi^2.
/// No accuracy is promised for grids below about 1e5.
double fit_c3(const DivisorTable& table, std::span<const double> t_grid);

/// A_f(x) for x <= table.limit().
double hecke_summatory(const HeckeTable& table, double x);

struct CfEstimate {
  double value = 0.0;
  double x = 0.0;
  /// Set when X < 1e3, where the Rankin-Selberg error term dominates.
  bool precision_warning = false;
};

/// sum_{n <= X} rho(n)^2 / X.
CfEstimate estimate_cf(const HeckeTable& table, double x);

/// Number of divisors by trial division; a reference for tests and selftest.
std::uint32_t count_divisors(std::uint64_t n);

std::uint64_t isqrt(std::uint64_t n);

}  // namespace ntdist::arith
