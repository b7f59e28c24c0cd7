#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "ntdist/errors.hpp"
#include "ntdist/parallel.hpp"
#include "ntdist/rng.hpp"
#include "ntdist/shortintervals.hpp"

using namespace ntdist;
using namespace ntdist::shortintervals;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr long double kGamma = 0.577215664901532860606512090082L;

// Delta(x) by trial-division counts and a long-double main term.
long double delta_oracle(long double x) {
  std::uint64_t D = 0;
  for (std::uint64_t n = 1; n <= static_cast<std::uint64_t>(x); ++n) D += arith::count_divisors(n);
  return D - x * (std::log(x) + 2 * kGamma - 1);
}

const arith::DivisorTable& dtable() {
  static const auto t = arith::DivisorTable::build(1'000'000);
  return t;
}

const arith::HeckeTable& htable() {
  static const auto t = arith::HeckeTable::build(12, 300'000);
  return t;
}

}  // namespace

TEST_CASE("series with one term") {
  const Coefficients c(dtable());
  for (double x : {2.0, 17.5, 1e5}) {
    CHECK(remainder_series(x, 1, c) ==
          doctest::Approx(std::cos(4 * kPi * std::sqrt(x) - kPi / 4) / (kPi * std::sqrt(2.0))).epsilon(1e-13));
  }
}

TEST_CASE("series approximates F(1e6)") {
  // x = 1e6 is a jump of Delta (d(x) = 49); the series converges to the midpoint.
  constexpr double kResidualAtN1e4 = 1.38;  // observed 1.3747
  const double x = 1e6;
  const auto s = Summatory::divisor();
  const double exact = s.F(x);
  const double mid = (s.remainder(x) - 0.5 * dtable().d(1'000'000)) / std::pow(x, 0.25);
  const Coefficients c(dtable());
  CHECK(std::abs(remainder_series(x, 10000, c) - exact) <= kResidualAtN1e4);
  CHECK(std::abs(remainder_series(x, 1'000'000, c) - mid) <= 0.15);
}

TEST_CASE("series residual shrinks with N") {
  Philox4x32 g(17);
  const Coefficients c(dtable());
  double r2 = 0, r4 = 0;
  for (int i = 0; i < 200; ++i) {
    const double x = 1e6 * (1 + g.uniform(0, i));
    const double F = Summatory::divisor().F(x);
    r2 += std::pow(remainder_series(x, 100, c) - F, 2);
    r4 += std::pow(remainder_series(x, 10000, c) - F, 2);
  }
  CHECK(std::sqrt(r4 / 200) < std::sqrt(r2 / 200));
}

TEST_CASE("exact short statistic against oracle") {
  const auto s = Summatory::divisor();
  const long double x2 = std::pow(10.0L + 0.2L, 2);
  const long double ref = delta_oracle(x2) / std::pow(x2, 0.25L) - delta_oracle(100) / std::pow(100.0L, 0.25L);
  CHECK(short_stat_exact(100, 5, s) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-12));
  CHECK(std::abs(short_stat_exact(100, 1e6, s)) <= 1e-2);
  CHECK_THROWS_AS(short_stat_exact(100, 1.5, s), DomainError);
  CHECK_THROWS_AS(short_stat_exact(0.5, 5, s), DomainError);
}

TEST_CASE("hecke short statistic at the L = 1 edge") {
  const auto s = Summatory::hecke(htable());
  const auto& t = htable();
  const double ref = t.prefix(9) / std::sqrt(3.0) - t.prefix(4) / std::sqrt(2.0);
  CHECK(short_stat_exact(4, 1, s) == doctest::Approx(ref).epsilon(1e-13));
  CHECK_THROWS_AS(short_stat_exact(4e5, 2, s), CapacityError);
}

TEST_CASE("short sum") {
  const Coefficients c(dtable());
  for (double x : {10.0, 1234.5}) {
    for (double L : {3.0, 10.0}) {
      const double one = -2 / (kPi * std::sqrt(2.0)) * std::sin(2 * kPi / L) *
                         std::sin(4 * kPi * (std::sqrt(x) + 1 / (2 * L)) - kPi / 4);
      CHECK(short_sum(x, L, 1, c) == doctest::Approx(one).epsilon(1e-13));
      // product-to-sum: equals the difference of truncated series at the endpoints
      const double x2 = std::pow(std::sqrt(x) + 1 / L, 2);
      const double diff = remainder_series(x2, 500, c) - remainder_series(x, 500, c);
      CHECK(std::abs(short_sum(x, L, 500, c) - diff) <= 1e-12);
    }
  }
  long double acc = 0;
  const long double sx = std::sqrt(1e6L) + 1 / 20.0L;
  const long double pi = std::numbers::pi_v<long double>;
  for (int n = 1; n <= 10000; ++n) {
    const long double sn = std::sqrt(static_cast<long double>(n));
    acc += dtable().d(n) * std::pow(static_cast<long double>(n), -0.75L) * std::sin(2 * pi * sn / 10) *
           std::sin(4 * pi * sn * sx - pi / 4);
  }
  const double ref = static_cast<double>(-2 / (pi * std::sqrt(2.0L)) * acc);
  CHECK(short_sum(1e6, 10, 10000, c) == doctest::Approx(ref).epsilon(1e-11).scale(1.0));
  CHECK_THROWS_AS(short_sum(1e6, 10, 2'000'000, c), CapacityError);
}

TEST_CASE("sigma_M^2") {
  const Coefficients c(dtable());
  CHECK(sigma_sq_M(1, 4, c) == doctest::Approx(1 / (kPi * kPi)).epsilon(1e-15));
  CHECK(std::abs(sigma_sq_M(1, 2, c)) < 1e-30);
  const double s = sigma_sq_M(1'000'000, 20, c);
  const double a = sigma_sq_asymptotic(20, Mode::divisor);
  CHECK(std::abs(s / a - 1) <= 0.25);
  double prev = 0;
  for (std::uint64_t M : {1, 10, 100, 1000, 10000}) {
    const double v = sigma_sq_M(M, 7, c);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("asymptotic variance") {
  CHECK(sigma_sq_asymptotic(std::numbers::e, Mode::divisor) == doctest::Approx(16 / (kPi * kPi * std::numbers::e)).epsilon(1e-15));
  CHECK(sigma_sq_asymptotic(std::numbers::e, Mode::divisor) == doctest::Approx(0.5963837).epsilon(1e-7));
  CHECK(sigma_sq_asymptotic(2, Mode::hecke, 0.384) == doctest::Approx(0.384).epsilon(1e-15));
  double prev = sigma_sq_asymptotic(std::exp(3.0), Mode::divisor);
  for (double L = std::exp(3.0) + 0.5; L < 1e4; L *= 1.3) {
    const double v = sigma_sq_asymptotic(L, Mode::divisor);
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS_AS(sigma_sq_asymptotic(1.0, Mode::divisor), DomainError);
  CHECK_THROWS_AS(sigma_sq_asymptotic(3.0, Mode::hecke), DomainError);
}

TEST_CASE("theorem statistic") {
  const auto s = Summatory::divisor();
  const long double num = delta_oracle(10010) - delta_oracle(10000);
  const double scale = 10 * std::sqrt(8 / (kPi * kPi) * std::pow(std::log(10.0), 3) / 10);
  CHECK(theorem_statistic(1e4, 10, s) == doctest::Approx(static_cast<double>(num) / scale).epsilon(1e-11));
  // (1e6 + 0.1, 1e6 + 0.1 + ~0.0001] holds no integer
  const double x = 1e6 + 0.1, L = 1e7;
  const double main = -((x + std::sqrt(x) / L) * (std::log(x + std::sqrt(x) / L) + 2 * 0.57721566490153286 - 1) -
                         x * (std::log(x) + 2 * 0.57721566490153286 - 1));
  const double v = theorem_statistic(x, L, s);
  CHECK(std::isfinite(v));
  CHECK(v * std::pow(x, 0.25) * std::sqrt(8 / (kPi * kPi) * std::pow(std::log(L), 3) / L) ==
        doctest::Approx(main).epsilon(1e-6));
  CHECK(std::abs(v) < 0.01);
}

TEST_CASE("increment agrees with the difference of remainders") {
  const auto s = Summatory::divisor();
  for (double x : {5e4, 1.2345e7}) {
    const double x2 = x + std::sqrt(x) / 3;
    CHECK(s.increment(x, x2) == doctest::Approx(s.remainder(x2) - s.remainder(x)).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("config validation") {
  ShortIntervalConfig c;
  c.T = 1e3;
  CHECK_THROWS_AS(c.validate(Summatory::divisor()), DomainError);
  c.T = 1e6;
  c.L = 1.5;
  CHECK_THROWS_AS(c.validate(Summatory::divisor()), DomainError);
  c.L = 100;
  CHECK(c.warnings().size() == 1);
  ShortIntervalConfig h;
  h.mode = Mode::hecke;
  h.T = 1e5;
  h.L = 1;
  CHECK_THROWS_AS(h.validate(Summatory::hecke(htable())), DomainError);  // no c_f
  h.cf_value = 0.384;
  CHECK_NOTHROW(h.validate(Summatory::hecke(htable())));
  h.T = 2e5;
  CHECK_THROWS_AS(h.validate(Summatory::hecke(htable())), CapacityError);
}

TEST_CASE("variance experiment: degenerate and deterministic") {
  ShortIntervalConfig c;
  c.T = 1e6;
  c.L = 8;
  c.samples = 1;
  c.seed = 5;
  const auto one = variance_experiment(c, Summatory::divisor());
  CHECK(one.degenerate);
  CHECK(one.sample_variance == 0.0);
  c.samples = 300;
  set_threads(1);
  const auto a = variance_experiment(c, Summatory::divisor());
  set_threads(3);
  const auto b = variance_experiment(c, Summatory::divisor());
  set_threads(0);
  CHECK(to_csv(a.samples) == to_csv(b.samples));
  CHECK(a.sample_variance == b.sample_variance);
  for (double x : a.samples.x) {
    CHECK(x >= 1e6);
    CHECK(x <= 2e6);
  }
}

TEST_CASE("exact and series statistics converge as M grows") {
  const Coefficients c(dtable());
  const auto s = Summatory::divisor();
  ShortIntervalConfig cfg;
  cfg.T = 1e6;
  cfg.seed = 99;
  std::vector<double> rms;
  for (std::uint64_t M : {100, 1000, 10000}) {
    double acc = 0;
    for (std::size_t i = 0; i < 200; ++i) {
      const double x = sample_point(cfg, i);
      acc += std::pow(short_stat_exact(x, 8, s) - short_sum(x, 8, M, c), 2);
    }
    rms.push_back(std::sqrt(acc / 200));
  }
  MESSAGE("rms exact-series gap at M = 1e2, 1e3, 1e4: " << rms[0] << ", " << rms[1] << ", " << rms[2]);
  CHECK(rms[1] < rms[0]);
  CHECK(rms[2] < rms[1]);
}

TEST_CASE("distribution experiment") {
  ShortIntervalConfig c;
  c.T = 1e6;
  c.L = 8;
  c.samples = 0;
  CHECK_THROWS_AS(distribution_experiment(c, Summatory::divisor()), DomainError);
  c.samples = 1500;
  c.seed = 1;
  const auto a = distribution_experiment(c, Summatory::divisor());
  c.seed = 2;
  const auto b = distribution_experiment(c, Summatory::divisor());
  const double ks_ab = stats::ks_two_sample(a.distribution, b.distribution);
  const double ks_a = stats::ks_to_normal(a.distribution), ks_b = stats::ks_to_normal(b.distribution);
  MESSAGE("two-seed KS " << ks_ab << ", KS to normal " << ks_a << ", " << ks_b);
  CHECK(ks_ab <= 2 * std::max(ks_a, ks_b));
}

TEST_CASE("centered at T = 1e8, L = 16") {
  ShortIntervalConfig c;
  c.T = 1e8;
  c.L = 16;
  c.samples = 1000;
  c.seed = 3;
  const auto d = distribution_experiment(c, Summatory::divisor());
  CHECK(std::abs(stats::mean(d.distribution)) <= 0.1);
}
