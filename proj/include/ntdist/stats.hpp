#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

namespace ntdist::stats {

/// Sorted samples; never empty.
class EmpiricalDistribution {
 public:
  /// Throws DomainError on an empty or non-finite sample set.
  explicit EmpiricalDistribution(std::vector<double> samples);

  std::size_t n() const noexcept { return samples_.size(); }
  std::span<const double> samples() const noexcept { return samples_; }
  /// Fraction of samples <= x.
  double cdf(double x) const;

 private:
  std::vector<double> samples_;
};

/// sup |F_n - Phi|, evaluated at the jump points.
double ks_to_normal(const EmpiricalDistribution& d);

/// sup |F_n - G_m| between two empirical distributions.
double ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

/// Raw moments (1/n) sum x^m for m = 1..max_m, each by pairwise summation.
std::vector<double> sample_moments(const EmpiricalDistribution& d, int max_m);

double mean(const EmpiricalDistribution& d);
/// Unbiased (n - 1) variance; 0 for a single sample.
double variance(const EmpiricalDistribution& d);

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
  double ks = 0.0;
};
Summary summarize(const EmpiricalDistribution& d);

struct HistogramBin {
  double left = 0.0, right = 0.0;
  std::size_t count = 0;
  double density = 0.0;
  double normal_density = 0.0;
};

/// Bins of Freedman-Diaconis width 2 IQR n^{-1/3}, falling back to Sturges'
/// bin count when the IQR vanishes; at most 1000 bins.
std::vector<HistogramBin> histogram(const EmpiricalDistribution& d);
void write_histogram_csv(std::ostream& out, std::span<const HistogramBin> bins);

}  // namespace ntdist::stats
