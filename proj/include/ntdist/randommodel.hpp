#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ntdist/arith.hpp"

namespace ntdist::randommodel {

/// Square-free q <= M, ascending, by sieving multiples of p^2.
std::vector<std::uint64_t> squarefree_sieve(std::uint64_t M);

struct ModelConfig {
  std::uint64_t M = 10000;
  double L = 50.0;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  int max_moment = 6;

  /// M >= 1, trials >= 1, L >= 2, 1 <= max_moment <= 20.
  void validate() const;
};

/// Precomputed terms of Y(q) = sum_f c_{q,f} e(f sqrt(q)/L - 1/8) X(q)^f over
/// n = q f^2 <= M, with c_{q,f} = -2 d(n) sin(2 pi f sqrt(q)/L) / (pi sqrt 2 q^{3/4} f^{3/2}).
class RandomModel {
 public:
  RandomModel(const arith::DivisorTable& table, const ModelConfig& cfg);

  const ModelConfig& config() const noexcept { return cfg_; }
  /// sigma_M = sqrt((1/pi^2) sum_{n<=M} d(n)^2 n^{-3/2} sin^2(2 pi sqrt(n)/L)).
  double sigma() const noexcept { return sigma_; }
  std::span<const std::uint64_t> squarefree() const noexcept { return q_; }

  /// theta_q in [0, 1) for (trial, q): Philox4x32-10 keyed by the seed.
  double theta(std::size_t trial, std::uint64_t q) const;

  /// Im Y(q) for the phase X(q) = e(theta).
  double im_y(std::size_t q_index, double theta) const;

  /// (1/sigma_M) sum_q Im Y(q) for one trial. The optional hook replaces
  /// the random phases (test use).
  double sample_model_sum(std::size_t trial,
                          const std::function<double(std::uint64_t)>& theta_override = {}) const;

  /// E[(Im Y(q))^2] = (1/2) sum_f c_{q,f}^2.
  double second_moment(std::size_t q_index) const;

 private:
  ModelConfig cfg_;
  double sigma_ = 0.0;
  std::vector<std::uint64_t> q_;
  std::vector<std::size_t> offset_;                  // terms of q_[i] at [offset_[i], offset_[i+1])
  std::vector<std::complex<double>> weight_;          // c_{q,f} e(f sqrt(q)/L - 1/8)
};

struct MomentReport {
  std::vector<double> estimates;        // m = 1..max_moment
  std::vector<double> standard_errors;  // NaN when trials < 2
  std::vector<double> gaussian_targets;
  bool standard_errors_available = false;
  std::vector<double> trial_sums;
  double sigma = 0.0;
};

/// Monte Carlo moments of the normalized model sum.
MomentReport model_moments_mc(const arith::DivisorTable& table, const ModelConfig& cfg);

/// m! / (2^{m/2} (m/2)!) for even m, 0 for odd m; m <= 20.
double gaussian_moment(int m);

/// Header trial,sum then one row per trial.
std::string to_csv(const MomentReport& r);

}  // namespace ntdist::randommodel
