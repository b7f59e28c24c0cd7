#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "ntdist/errors.hpp"
#include "ntdist/rng.hpp"
#include "ntdist/special.hpp"
#include "ntdist/stats.hpp"

using namespace ntdist;
using namespace ntdist::stats;

namespace {

std::vector<double> normals(std::uint64_t seed, std::size_t n, std::uint64_t stream = 0) {
  Philox4x32 gen(seed);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = gen.normal(stream, i);
  return out;
}

}  // namespace

TEST_CASE("philox known-answer vectors") {
  // Random123 reference: key 0, counter 0 and key/counter all ones.
  Philox4x32 zero(0);
  const auto b = zero(0, 0);
  CHECK(b[0] == 0x6627e8d5u);
  CHECK(b[1] == 0xe169c58du);
  CHECK(b[2] == 0xbc57ac4cu);
  CHECK(b[3] == 0x9b00dbd8u);
  Philox4x32 ones(0xffffffffffffffffull);
  const auto c = ones(~0ull, ~0ull);
  CHECK(c[0] == 0x408f276du);
  CHECK(c[1] == 0x41c83b0eu);
  CHECK(c[2] == 0xa20bc7c6u);
  CHECK(c[3] == 0x6d5451fdu);
}

TEST_CASE("uniforms lie in [0, 1)") {
  Philox4x32 g(42);
  double lo = 1, hi = 0, sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = g.uniform(1, i);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("empty distribution is rejected") {
  CHECK_THROWS_AS(EmpiricalDistribution({}), DomainError);
  CHECK_THROWS_AS(EmpiricalDistribution({1.0, std::nan("")}), DomainError);
}

TEST_CASE("KS against ideal quantiles and a point mass") {
  std::vector<double> q;
  for (int i = 1; i <= 100; ++i) q.push_back(special::normal_quantile((i - 0.5) / 100));
  CHECK(ks_to_normal(EmpiricalDistribution(q)) <= 0.5 / 100 + 1e-6);
  CHECK(ks_to_normal(EmpiricalDistribution({0.0})) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("KS 99% critical value regenerated by simulation") {
  // sqrt(n) D for n = 400 over 2000 replicates; the 99th percentile is ~1.63.
  std::vector<double> stat;
  for (std::uint64_t r = 0; r < 2000; ++r) stat.push_back(std::sqrt(400.0) * ks_to_normal(EmpiricalDistribution(normals(7, 400, r))));
  std::sort(stat.begin(), stat.end());
  const double crit = stat[static_cast<std::size_t>(0.99 * stat.size())];
  CHECK(crit == doctest::Approx(1.63).epsilon(0.1));

  const EmpiricalDistribution big(normals(2024, 10000));
  CHECK(ks_to_normal(big) <= 1.63 / std::sqrt(10000.0));
}

TEST_CASE("moments") {
  const auto pm = sample_moments(EmpiricalDistribution({-1.0, 1.0}), 4);
  CHECK(pm[0] == 0.0);
  CHECK(pm[1] == 1.0);
  CHECK(pm[2] == 0.0);
  CHECK(pm[3] == 1.0);
  for (double m : sample_moments(EmpiricalDistribution({0.0}), 6)) CHECK(m == 0.0);

  const auto nm = sample_moments(EmpiricalDistribution(normals(99, 100000)), 4);
  CHECK(nm[1] >= 0.98);
  CHECK(nm[1] <= 1.02);
  CHECK(nm[3] >= 2.9);
  CHECK(nm[3] <= 3.1);
  CHECK_THROWS_AS(sample_moments(EmpiricalDistribution({1.0}), 0), DomainError);
}

TEST_CASE("pairwise moments against extended precision on 1e6 samples") {
  const auto xs = normals(5, 1000000);
  const auto m = sample_moments(EmpiricalDistribution(xs), 4);
  for (int k = 1; k <= 4; ++k) {
    long double acc = 0;
    for (double x : xs) acc += std::pow(static_cast<long double>(x), k);
    const double ref = static_cast<double>(acc / xs.size());
    // odd moments are near zero; compare against the scale of sum |x|^k
    long double scale = 0;
    for (double x : xs) scale += std::pow(std::abs(static_cast<long double>(x)), k);
    CHECK(std::abs(m[k - 1] - ref) <= 1e-12 * static_cast<double>(scale / xs.size()));
  }
}

TEST_CASE("mean and unbiased variance") {
  const EmpiricalDistribution d({1.0, 2.0, 3.0, 4.0});
  CHECK(mean(d) == 2.5);
  CHECK(variance(d) == doctest::Approx(5.0 / 3.0));
  CHECK(variance(EmpiricalDistribution({3.0})) == 0.0);
  const auto s = summarize(d);
  CHECK(s.n == 4);
}

TEST_CASE("permutation invariance") {
  auto xs = normals(11, 777);
  const EmpiricalDistribution a(xs);
  std::reverse(xs.begin(), xs.end());
  std::rotate(xs.begin(), xs.begin() + 100, xs.end());
  const EmpiricalDistribution b(xs);
  CHECK(ks_to_normal(a) == ks_to_normal(b));
  CHECK(sample_moments(a, 6) == sample_moments(b, 6));
  CHECK(ks_two_sample(a, b) == 0.0);
}

TEST_CASE("two-sample KS") {
  CHECK(ks_two_sample(EmpiricalDistribution({0.0}), EmpiricalDistribution({1.0})) == 1.0);
  CHECK(ks_two_sample(EmpiricalDistribution({0.0, 2.0}), EmpiricalDistribution({1.0, 3.0})) == 0.5);
  const EmpiricalDistribution a(normals(1, 3000)), b(normals(2, 3000));
  CHECK(ks_two_sample(a, b) <= 1.63 * std::sqrt(2.0 / 3000));
}

TEST_CASE("histogram") {
  const EmpiricalDistribution d(normals(3, 5000));
  const auto bins = histogram(d);
  CHECK(bins.size() > 10);
  std::size_t total = 0;
  double mass = 0;
  for (const auto& b : bins) {
    total += b.count;
    mass += b.density * (b.right - b.left);
    CHECK(b.right > b.left);
  }
  CHECK(total == 5000);
  CHECK(mass == doctest::Approx(1.0));
  std::ostringstream out;
  write_histogram_csv(out, bins);
  CHECK(out.str().rfind("binLeft,binRight,count,empiricalDensity,normalDensity\n", 0) == 0);

  const auto flat = histogram(EmpiricalDistribution({2.0, 2.0, 2.0}));
  CHECK(flat.size() == 1);
  CHECK(flat[0].count == 3);
}
