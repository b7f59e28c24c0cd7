#include "ntdist/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ntdist/errors.hpp"
#include "ntdist/io.hpp"
#include "ntdist/parallel.hpp"
#include "ntdist/special.hpp"

namespace ntdist::stats {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) throw DomainError("empirical distribution needs at least one sample");
  for (double x : samples_) {
    if (!std::isfinite(x)) throw DomainError("empirical distribution got a non-finite sample");
  }
  std::sort(samples_.begin(), samples_.end());
}

double EmpiricalDistribution::cdf(double x) const {
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
  return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
}

double ks_to_normal(const EmpiricalDistribution& d) {
  const auto xs = d.samples();
  const double n = static_cast<double>(xs.size());
  double D = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = special::normal_cdf(xs[i]);
    D = std::max({D, (i + 1) / n - F, F - i / n});
  }
  return D;
}

double ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  const auto xa = a.samples(), xb = b.samples();
  const double na = static_cast<double>(xa.size()), nb = static_cast<double>(xb.size());
  std::size_t i = 0, j = 0;
  double D = 0.0;
  while (i < xa.size() && j < xb.size()) {
    const double x = std::min(xa[i], xb[j]);
    while (i < xa.size() && xa[i] <= x) ++i;
    while (j < xb.size() && xb[j] <= x) ++j;
    D = std::max(D, std::abs(i / na - j / nb));
  }
  return D;
}

std::vector<double> sample_moments(const EmpiricalDistribution& d, int max_m) {
  if (max_m < 1) throw DomainError("max moment must be >= 1");
  const auto xs = d.samples();
  std::vector<double> power(xs.begin(), xs.end());
  std::vector<double> out;
  for (int m = 1; m <= max_m; ++m) {
    if (m > 1) {
      for (std::size_t i = 0; i < xs.size(); ++i) power[i] *= xs[i];
    }
    out.push_back(pairwise_sum(power) / static_cast<double>(xs.size()));
  }
  return out;
}

double mean(const EmpiricalDistribution& d) {
  return pairwise_sum(d.samples()) / static_cast<double>(d.n());
}

double variance(const EmpiricalDistribution& d) {
  if (d.n() < 2) return 0.0;
  const double mu = mean(d);
  std::vector<double> sq(d.samples().begin(), d.samples().end());
  for (double& x : sq) x = (x - mu) * (x - mu);
  return pairwise_sum(sq) / static_cast<double>(d.n() - 1);
}

Summary summarize(const EmpiricalDistribution& d) {
  return {d.n(), mean(d), variance(d), ks_to_normal(d)};
}

namespace {

// Linear-interpolation quantile (type 7).
double quantile(std::span<const double> xs, double q) {
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

}  // namespace

std::vector<HistogramBin> histogram(const EmpiricalDistribution& d) {
  const auto xs = d.samples();
  const double lo = xs.front(), hi = xs.back();
  const double n = static_cast<double>(xs.size());
  std::size_t bins = 1;
  if (hi > lo) {
    const double iqr = quantile(xs, 0.75) - quantile(xs, 0.25);
    if (iqr > 0) {
      const double width = 2.0 * iqr / std::cbrt(n);
      bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
    } else {
      bins = static_cast<std::size_t>(std::ceil(std::log2(n))) + 1;
    }
    bins = std::clamp<std::size_t>(bins, 1, 1000);
  }
  const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;
  const double left0 = hi > lo ? lo : lo - 0.5;
  std::vector<HistogramBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].left = left0 + width * static_cast<double>(b);
    out[b].right = b + 1 == bins ? (hi > lo ? hi : lo + 0.5) : left0 + width * static_cast<double>(b + 1);
  }
  for (double x : xs) {
    auto b = static_cast<std::size_t>((x - left0) / width);
    ++out[std::min(b, bins - 1)].count;
  }
  for (auto& bin : out) {
    const double wdt = bin.right - bin.left;
    bin.density = static_cast<double>(bin.count) / (n * wdt);
    bin.normal_density = (special::normal_cdf(bin.right) - special::normal_cdf(bin.left)) / wdt;
  }
  return out;
}

void write_histogram_csv(std::ostream& out, std::span<const HistogramBin> bins) {
  out << "binLeft,binRight,count,empiricalDensity,normalDensity\n";
  for (const auto& b : bins) {
    out << io::format_double(b.left) << ',' << io::format_double(b.right) << ',' << b.count << ','
        << io::format_double(b.density) << ',' << io::format_double(b.normal_density) << '\n';
  }
}

}  // namespace ntdist::stats
