#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ntdist/arith.hpp"
#include "ntdist/coefficients.hpp"
#include "ntdist/stats.hpp"

namespace ntdist::shortintervals {

/// Exact summatory data: the hyperbola method for d(n), prefix sums of a
/// Hecke table for rho_f(n).
class Summatory {
 public:
  static Summatory divisor() { return Summatory(nullptr); }
  static Summatory hecke(const arith::HeckeTable& t) { return Summatory(&t); }

  Mode mode() const noexcept { return hecke_ ? Mode::hecke : Mode::divisor; }
  const arith::HeckeTable* table() const noexcept { return hecke_; }
  /// Delta(x) or A_f(x); capacity error past the table.
  double remainder(double x) const;
  /// remainder(x2) - remainder(x1) without cancelling the large main terms.
  double increment(double x1, double x2) const;
  /// F(x) = remainder(x) / x^{1/4}.
  double F(double x) const;

 private:
  explicit Summatory(const arith::HeckeTable* t) : hecke_(t) {}
  const arith::HeckeTable* hecke_;
};

/// (1/(pi sqrt 2)) sum_{n <= N} tau(n) n^{-3/4} cos(4 pi sqrt(n x) - pi/4).
double remainder_series(double x, std::uint64_t N, const Coefficients& c);

/// S(x, L) = F((sqrt x + 1/L)^2) - F(x) from exact summatory values.
double short_stat_exact(double x, double L, const Summatory& s);

/// S(x, L, M) = -(2/(pi sqrt 2)) sum_{n <= M} tau(n) n^{-3/4} sin(2 pi sqrt(n)/L)
///              * sin(4 pi sqrt(n) (sqrt x + 1/(2L)) - pi/4).
double short_sum(double x, double L, std::uint64_t M, const Coefficients& c);

/// (1/pi^2) sum_{n <= M} tau(n)^2 n^{-3/2} sin^2(2 pi sqrt(n)/L).
double sigma_sq_M(std::uint64_t M, double L, const Coefficients& c);

/// (16/pi^2) log^3 L / L, or 2 c_f / L.
double sigma_sq_asymptotic(double L, Mode mode, double cf_value = 0.0);

/// Normalized increment over [x, x + sqrt(x)/L]: divided by
/// x^{1/4} sqrt((8/pi^2) log^3 L / L), or x^{1/4} sqrt(c_f / L).
double theorem_statistic(double x, double L, const Summatory& s, double cf_value = 0.0);

struct ShortIntervalConfig {
  double T = 1e6;
  double L = 16.0;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  Mode mode = Mode::divisor;
  double cf_value = 0.0;

  /// T >= 1e4; L >= 2 (divisor) or L >= 1 (hecke); c_f > 0 in hecke mode;
  /// the Hecke table must reach (sqrt(2T) + 1/L)^2.
  void validate(const Summatory& s) const;
  /// Non-fatal notes, e.g. L above T^{0.2}.
  std::vector<std::string> warnings() const;
};

/// x_i uniform on [T, 2T] from Philox keyed by seed ^ mix64(i).
double sample_point(const ShortIntervalConfig& cfg, std::size_t i);

struct SampleSet {
  std::vector<double> x;
  std::vector<double> statistic;
};

struct VarianceResult {
  SampleSet samples;
  double sample_variance = 0.0;
  double ratio_to_asymptotic = 0.0;
  /// Fewer than two samples: variance reported as 0.
  bool degenerate = false;
};

/// Variance of S(x, L) over the sample, against sigma_sq_asymptotic.
VarianceResult variance_experiment(const ShortIntervalConfig& cfg, const Summatory& s);

struct DistributionResult {
  SampleSet samples;
  stats::EmpiricalDistribution distribution;
};

/// theorem_statistic at the sample points; zero samples is a DomainError.
DistributionResult distribution_experiment(const ShortIntervalConfig& cfg, const Summatory& s);

/// Header x,statistic then one row per sample.
std::string to_csv(const SampleSet& s);

}  // namespace ntdist::shortintervals
