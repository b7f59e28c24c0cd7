#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "ntdist/errors.hpp"
#include "ntdist/parallel.hpp"
#include "ntdist/progressions.hpp"

using namespace ntdist;
using namespace ntdist::progressions;

namespace {

constexpr double kGamma = 0.57721566490153286;

ProgressionConfig divisor_cfg(std::uint64_t p, double phi) {
  ProgressionConfig c;
  c.p = p;
  c.phi = phi;
  c.mode = Mode::divisor;
  return c;
}

long double w_ref(long double delta, long double x) {
  auto h = [](long double s) { return s > 0 ? std::exp(-1 / s) : 0.0L; };
  auto g = [&](long double t) { return h(t) / (h(t) + h(1 - t)); };
  if (x <= delta || x >= 1) return 0;
  if (x < 2 * delta) return g((x - delta) / delta);
  if (x > 1 - delta) return g((1 - x) / delta);
  return 1;
}

// Straightforward smoothed E for the divisor function: trial-division d(n),
// long-double sums and Simpson integrals.
std::vector<double> smoothed_oracle(std::uint64_t p, double phi, long double delta) {
  const long double X = static_cast<long double>(p) * p / phi;
  std::vector<long double> S(p, 0);
  long double total = 0;
  for (std::uint64_t n = 1; n <= static_cast<std::uint64_t>(X); ++n) {
    const long double v = arith::count_divisors(n) * w_ref(delta, n / X);
    S[n % p] += v;
    total += v;
  }
  const long n_simp = 2'000'000;
  const long double h = (1 - delta) / n_simp;
  long double iw = 0, ilog = 0, iw2 = 0;
  for (long i = 0; i <= n_simp; ++i) {
    const long double u = delta + i * h;
    const long double c = (i == 0 || i == n_simp) ? 1 : (i % 2 ? 4 : 2);
    const long double wv = w_ref(delta, u);
    iw += c * wv;
    ilog += c * std::log(u) * wv;
    iw2 += c * wv * wv;
  }
  iw *= h / 3;
  ilog *= h / 3;
  iw2 *= h / 3;
  const long double pl = p;
  const long double M = total / pl - X / (pl * pl) * ((std::log(X) + 2 * kGamma - 2 * std::log(pl)) * iw + ilog);
  const long double pi = std::numbers::pi_v<long double>;
  const long double norm = std::sqrt(iw2) * std::sqrt(2 / (pi * pi) * (X / pl) * std::pow(std::log(phi + 2.0L), 3));
  std::vector<double> E;
  for (std::uint64_t a = 1; a < p; ++a) E.push_back(static_cast<double>((S[a] - M) / norm));
  return E;
}

}  // namespace

TEST_CASE("sharp divisor sums, p = 5, X = 20") {
  auto t = arith::DivisorTable::build(100);
  const auto r = sharp_progression_values(divisor_cfg(5, 25.0 / 20.0), Coefficients(t));
  CHECK(r.sums[0] == 12.0);
  REQUIRE(r.values.size() == 4);
  const double M = 66.0 / 5 - 20.0 / 25 * (std::log(20.0) - 1 + 2 * kGamma - 2 * std::log(5.0));
  const double norm = std::sqrt(2 / (std::numbers::pi * std::numbers::pi) * 4 * std::pow(std::log(3.25), 3));
  CHECK(r.mean_term == doctest::Approx(M).epsilon(1e-14));
  CHECK(r.normalization == doctest::Approx(norm).epsilon(1e-14));
  CHECK(r.values[0] == doctest::Approx((12 - M) / norm).epsilon(1e-14));
}

TEST_CASE("mass conservation is exact") {
  auto t = arith::DivisorTable::build(200000);
  for (auto [p, phi] : {std::pair<std::uint64_t, double>{101, 1.0}, {211, 3.7}, {401, 2.0}}) {
    const auto cfg = divisor_cfg(p, phi);
    const auto r = sharp_progression_values(cfg, Coefficients(t));
    const auto N = static_cast<std::uint64_t>(std::floor(cfg.X()));
    std::uint64_t units = 0, multiples = 0;
    for (double s : r.sums) units += static_cast<std::uint64_t>(s);
    for (std::uint64_t n = p; n <= N; n += p) multiples += t.d(n);
    CHECK(units + multiples == t.prefix(N));
  }
}

TEST_CASE("sharp hecke sum, p = 3, X = 4") {
  auto t = arith::HeckeTable::build(12, 100);
  ProgressionConfig cfg;
  cfg.p = 3;
  cfg.phi = 9.0 / 4.0;
  cfg.mode = Mode::hecke;
  cfg.cf_value = 0.384;
  const auto r = sharp_progression_values(cfg, Coefficients(t));
  // rho(4) = -1472 / 4^{5.5} = -1472 / 2048
  CHECK(t.rho(4) == doctest::Approx(-0.71875).epsilon(1e-15));
  CHECK(r.sums[0] == doctest::Approx(0.28125).epsilon(1e-14));
  CHECK(r.mean_term == doctest::Approx(t.prefix(4) / 3).epsilon(1e-14));
}

TEST_CASE("configuration errors") {
  auto t = arith::DivisorTable::build(1000);
  auto h = arith::HeckeTable::build(12, 1000);
  CHECK_THROWS_AS(sharp_progression_values(divisor_cfg(100, 2), Coefficients(t)), DomainError);
  CHECK_THROWS_AS(sharp_progression_values(divisor_cfg(101, 0.5), Coefficients(t)), DomainError);
  CHECK_THROWS_AS(sharp_progression_values(divisor_cfg(101, 200), Coefficients(t)), DomainError);
  CHECK_THROWS_AS(sharp_progression_values(divisor_cfg(101, 2), Coefficients(t)), CapacityError);
  CHECK_THROWS_AS(sharp_progression_values(divisor_cfg(31, 2), Coefficients(h)), DomainError);
  auto hc = divisor_cfg(31, 2);
  hc.mode = Mode::hecke;
  CHECK_THROWS_AS(sharp_progression_values(hc, Coefficients(h)), DomainError);  // no c_f
  CHECK_THROWS_AS(smoothed_progression_values(divisor_cfg(31, 2), Coefficients(t)), DomainError);
  CHECK_THROWS_AS(parse_mode("cusp"), DomainError);
}

TEST_CASE("smoothed weights on the plateau are exactly one") {
  const auto w = windows::WindowSpec::single(0.25);
  for (int i = 0; i <= 100; ++i) CHECK(windows::window_eval(w, 0.5 + 0.25 * i / 100) == 1.0);
}

TEST_CASE("smoothed divisor vector, p = 101, phi = 16, delta = 0.05, against oracle") {
  auto t = arith::DivisorTable::build(1000);
  auto cfg = divisor_cfg(101, 16);
  cfg.window = windows::WindowSpec::single(0.05);
  const auto r = smoothed_progression_values(cfg, Coefficients(t));
  const auto ref = smoothed_oracle(101, 16, 0.05L);
  REQUIRE(r.values.size() == ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(r.values[i] == doctest::Approx(ref[i]).epsilon(1e-10).scale(1.0));
}

TEST_CASE("smoothed hecke mean term has no integral part") {
  auto t = arith::HeckeTable::build(12, 5000);
  ProgressionConfig cfg;
  cfg.p = 101;
  cfg.phi = 3;
  cfg.mode = Mode::hecke;
  cfg.cf_value = 0.384;
  cfg.window = windows::WindowSpec::single(0.1);
  const auto r = smoothed_progression_values(cfg, Coefficients(t));
  double total = 0;
  for (std::uint64_t n = 1; n <= 3400; ++n) total += t.rho(n) * windows::window_eval(*cfg.window, n / cfg.X());
  CHECK(r.mean_term == doctest::Approx(total / 101).epsilon(1e-12).scale(1e-3));
}

TEST_CASE("Voronoi identity, divisor, p = 101, phi = 16, delta = 0.05") {
  auto t = arith::DivisorTable::build(16'000'100);
  auto cfg = divisor_cfg(101, 16);
  cfg.window = windows::WindowSpec::single(0.05);
  const auto direct = smoothed_progression_values(cfg, Coefficients(t));
  const auto dual = voronoi_dual(cfg, Coefficients(t), 1e-5);
  CHECK(dual.tol_met);
  CHECK(dual.tail_bound <= 1e-5);
  CHECK(dual.n_negative > 0);
  double worst = 0;
  for (std::size_t i = 0; i < dual.values.size(); ++i) worst = std::max(worst, std::abs(direct.values[i] - dual.values[i]));
  CHECK(worst <= 1e-4 + dual.tail_bound);
  CHECK(voronoi_dual_eval(cfg, Coefficients(t), 7, 1e-5) == dual.values[6]);
}

TEST_CASE("Voronoi identity, p = 13, X = 16") {
  auto t = arith::DivisorTable::build(10'600'000);
  auto cfg = divisor_cfg(13, 169.0 / 16.0);
  cfg.window = windows::WindowSpec::single(0.1);
  const auto direct = smoothed_progression_values(cfg, Coefficients(t));
  const double dual = voronoi_dual_eval(cfg, Coefficients(t), 1, 1e-5);
  CHECK(dual == doctest::Approx(direct.values[0]).epsilon(1e-4).scale(1.0));
}

TEST_CASE("hecke dual: no negative terms; short table gives an accuracy error") {
  auto t = arith::HeckeTable::build(12, 40000);
  ProgressionConfig cfg;
  cfg.p = 101;
  cfg.phi = 16;
  cfg.mode = Mode::hecke;
  cfg.cf_value = 0.384;
  cfg.window = windows::WindowSpec::single(0.05);
  const auto r = voronoi_dual(cfg, Coefficients(t), 1e-5);
  CHECK(r.n_negative == 0);
  CHECK_FALSE(r.tol_met);
  CHECK(r.tail_bound > 1e-5);
  try {
    voronoi_dual_eval(cfg, Coefficients(t), 1, 1e-5);
    FAIL("expected AccuracyError");
  } catch (const AccuracyError& e) {
    CHECK(e.best_estimate() == r.values[0]);
    CHECK(e.error_estimate() == r.tail_bound);
  }
  // the truncated sum is still close to the direct side, within its own bound
  const auto direct = smoothed_progression_values(cfg, Coefficients(t));
  double worst = 0;
  for (std::size_t i = 0; i < r.values.size(); ++i) worst = std::max(worst, std::abs(direct.values[i] - r.values[i]));
  CHECK(worst <= 1e-4 + r.tail_bound);
}

TEST_CASE("sharp-smooth gap") {
  auto t = arith::DivisorTable::build(300000);
  const auto c101 = divisor_cfg(101, 4);
  const auto c1009 = divisor_cfg(1009, 4);
  CHECK_THROWS_AS(sharp_smooth_gap(c101, Coefficients(t), 0.01), DomainError);  // 2p/X = 0.079
  const double g101 = sharp_smooth_gap(c101, Coefficients(t), regime_delta(101, c101.X()));
  const double g1009 = sharp_smooth_gap(c1009, Coefficients(t), regime_delta(1009, c1009.X()));
  CHECK(g101 >= 0);
  CHECK(g1009 >= 0);
  CHECK(g1009 < g101);
  MESSAGE("gap(101, phi 4) = " << g101 << ", gap(1009, phi 4) = " << g1009);
}

TEST_CASE("results do not depend on the thread count") {
  auto t = arith::DivisorTable::build(2'000'000);
  auto h = arith::HeckeTable::build(12, 200000);
  ProgressionConfig hc;
  hc.p = 401;
  hc.phi = 1.5;
  hc.mode = Mode::hecke;
  hc.cf_value = 0.384;
  set_threads(1);
  const auto a1 = sharp_progression_values(divisor_cfg(1009, 1.0), Coefficients(t));
  const auto b1 = sharp_progression_values(hc, Coefficients(h));
  set_threads(4);
  const auto a4 = sharp_progression_values(divisor_cfg(1009, 1.0), Coefficients(t));
  const auto b4 = sharp_progression_values(hc, Coefficients(h));
  set_threads(0);
  CHECK(a1.values == a4.values);
  CHECK(b1.values == b4.values);
  CHECK(to_csv(a1) == to_csv(a4));
}

TEST_CASE("experiment plumbing") {
  auto t = arith::DivisorTable::build(100);
  const auto d = progression_experiment(divisor_cfg(5, 1.25), Coefficients(t));
  CHECK(d.n() == 4);
  const double ks = stats::ks_to_normal(d);
  CHECK(ks >= 0);
  CHECK(ks <= 1);
  const auto csv = to_csv(sharp_progression_values(divisor_cfg(5, 1.25), Coefficients(t)));
  CHECK(csv.rfind("a,S,E\n1,12,", 0) == 0);
}

TEST_CASE("centering at p = 10007") {
  auto t = arith::DivisorTable::build(4'100'000);
  const auto d = progression_experiment(divisor_cfg(10007, 25), Coefficients(t));
  CHECK(std::abs(stats::mean(d)) <= 3 / std::sqrt(10006.0));
}
