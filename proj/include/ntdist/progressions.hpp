#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ntdist/arith.hpp"
#include "ntdist/coefficients.hpp"
#include "ntdist/stats.hpp"
#include "ntdist/windows.hpp"

namespace ntdist::progressions {

using ntdist::Coefficients;
using ntdist::Mode;

struct ProgressionConfig {
  std::uint64_t p = 101;
  double phi = 16.0;
  Mode mode = Mode::divisor;
  std::optional<windows::WindowSpec> window;
  /// Rankin-Selberg constant for the cusp-form normalization.
  double cf_value = 0.0;

  double X() const { return static_cast<double>(p) * static_cast<double>(p) / phi; }
  /// Dual scale p^2 / X.
  double Y() const { return phi; }
  /// Throws DomainError for a non-prime p, phi < 1, X < p, a missing c_f in
  /// cusp mode, or a mode that disagrees with the coefficient table.
  void validate(const Coefficients& c) const;
};

struct ProgressionResult {
  ProgressionConfig config;
  /// values[a - 1] = E(a), sums[a - 1] = S(a), a = 1..p-1.
  std::vector<double> values;
  std::vector<double> sums;
  double mean_term = 0.0;
  double normalization = 0.0;
  /// Smoothed mode: window L2 norm; 1 for sharp cutoffs.
  double window_norm = 1.0;
};

/// Sharp cutoff n <= X. Divisor sums are exact 64-bit integers.
ProgressionResult sharp_progression_values(const ProgressionConfig& cfg, const Coefficients& c);

/// Weighted by w(n / X); cfg.window must be set.
ProgressionResult smoothed_progression_values(const ProgressionConfig& cfg, const Coefficients& c);

struct DualOptions {
  /// Largest n / Y at which transforms are tabulated (capped by the table).
  double xi_far = 1e6;
  int envelope_a_min = 3;
  int envelope_a_max = 8;
};

struct DualResult {
  std::vector<double> values;  // a = 1..p-1
  double sigma = 0.0;
  /// Bound on the omitted part of the dual sum, on the E scale.
  double tail_bound = 0.0;
  bool tol_met = false;
  std::uint64_t n_truncation = 0;
  std::uint64_t n_negative = 0;
  double xi_far = 0.0;
  int envelope_a = 0;
  double envelope_c = 0.0;
};

/// Dual side of the Voronoi identity for every residue a, truncated at the
/// smallest |n| for which the estimated tail is <= tol.
DualResult voronoi_dual(const ProgressionConfig& cfg, const Coefficients& c, double tol,
                        const DualOptions& opt = {});

/// Single residue; throws AccuracyError (carrying the truncated value and its
/// tail bound) when tol cannot be reached within the table.
double voronoi_dual_eval(const ProgressionConfig& cfg, const Coefficients& c, std::uint64_t a,
                         double tol, const DualOptions& opt = {});

/// delta = (p/X)^{1/2} (pX)^{-0.01}.
double regime_delta(std::uint64_t p, double X);

/// (1/(p-1)) sum_a |E(a) - E(a; w_delta)|. Requires 2p/X <= delta.
double sharp_smooth_gap(const ProgressionConfig& cfg, const Coefficients& c, double delta);

/// Empirical distribution of the sharp values E(a).
stats::EmpiricalDistribution progression_experiment(const ProgressionConfig& cfg, const Coefficients& c);

/// Header a,S,E then one row per residue.
std::string to_csv(const ProgressionResult& r);

}  // namespace ntdist::progressions
