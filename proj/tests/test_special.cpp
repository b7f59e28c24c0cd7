#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "ntdist/errors.hpp"
#include "ntdist/quadrature.hpp"
#include "ntdist/special.hpp"

using namespace ntdist;
using namespace ntdist::special;

namespace {

// 40-term power series in long double.
long double j_series_oracle(int nu, long double x) {
  long double term = 1, h = x / 2;
  for (int i = 1; i <= nu; ++i) term *= h / i;
  long double sum = term;
  for (int k = 1; k < 40; ++k) {
    term *= -h * h / (static_cast<long double>(k) * (k + nu));
    sum += term;
  }
  return sum;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST_CASE("J at zero and small arguments") {
  CHECK(bessel_j(0, 0.0) == 1.0);
  for (int nu = 1; nu <= 64; ++nu) CHECK(bessel_j(nu, 0.0) == 0.0);
  CHECK(rel(bessel_j1(1.0), static_cast<double>(j_series_oracle(1, 1.0L))) < 1e-14);
  CHECK(bessel_j1(1.0) == doctest::Approx(0.4400505857).epsilon(1e-10));
  for (double x : {1e-6, 1e-3, 0.5, 2.0, 7.0}) {
    for (int nu : {0, 1, 2, 5, 11}) {
      const double want = static_cast<double>(j_series_oracle(nu, x));
      if (want == 0.0) continue;
      CHECK(rel(bessel_j(nu, x), want) < 1e-12);
    }
  }
}

TEST_CASE("J against extended-precision reference values") {
  struct Row {
    int nu;
    double x, want;
  };
  const std::vector<Row> rows = {
      {0, 20, 0.167024664340583154727320544701},
      {1, 20, 0.0668331241758500455789929741936},
      {5, 30, -0.14324029551207707698525802166},
      {11, 40, -0.0138084242465220218268655026943},
      {11, 20.5, 0.129323979855839551027297504372},
      {64, 50, 0.0000635838330067520585691873393631},
      {64, 16, 1.83432096409431292035149779236e-32},
      {30, 63.9, -0.0407139218903231987435514861367},
      {2, 17, 0.158363841238503471416085914878},
      {0, 1e5, -0.00171920111623597219257060147707},
      {11, 1e5, -0.00184572570985423865806106669534},
  };
  for (const auto& r : rows) {
    CAPTURE(r.nu);
    CAPTURE(r.x);
    CHECK(rel(bessel_j(r.nu, r.x), r.want) < 1e-10);
  }
}

TEST_CASE("J agrees with the standard library on a grid") {
  for (int nu : {0, 1, 3, 11, 20}) {
    for (double x = 0.05; x < 200.0; x *= 1.17) {
      const double want = std::cyl_bessel_j(static_cast<double>(nu), x);
      const double got = bessel_j(nu, x);
      CAPTURE(nu);
      CAPTURE(x);
      CHECK(std::abs(got - want) <= 1e-10 * std::max(std::abs(want), 1e-3));
      CHECK(std::abs(got) <= 1.0);
    }
  }
}

TEST_CASE("Y0 and K0") {
  CHECK(bessel_y0(1.0) == doctest::Approx(0.0882569642).epsilon(1e-10));
  CHECK(bessel_k0(1.0) == doctest::Approx(0.4210244382).epsilon(1e-10));
  CHECK(rel(bessel_y0(1e-6), -8.86903148165944373174253261277) < 1e-12);
  CHECK(rel(bessel_y0(16.0), 0.0958109970807124031420709659032) < 1e-11);
  CHECK(rel(bessel_y0(16.0001), 0.0957931991404111869504117853649) < 1e-11);
  CHECK(rel(bessel_y0(20.0), 0.0626405968093838311617290141054) < 1e-11);
  CHECK(rel(bessel_y0(1e3), 0.00471591797762281339977326146566) < 1e-10);
  CHECK(rel(bessel_y0(1e5), 0.00184676615886506410434074102432) < 1e-10);
  CHECK(rel(bessel_k0(1e-6), 13.931442073626419458688962846) < 1e-12);
  CHECK(rel(bessel_k0(10.0), 0.0000177800623161676518113011927995) < 1e-11);
  CHECK(rel(bessel_k0(29.99), 2.15426542813594881680437749707e-14) < 1e-11);
  CHECK(rel(bessel_k0(30.0), 2.13247749646305637116689606297e-14) < 1e-11);
  CHECK(rel(bessel_k0(50.0), 3.41016774978949551392067551235e-23) < 1e-11);
  CHECK(rel(bessel_k0(300.0), 3.72369485488914326325221016776e-132) < 1e-11);
  CHECK(bessel_k0(800.0) == 0.0);

  const double x = 1e-6;
  const double lead = 2.0 / std::numbers::pi * (std::log(x / 2) + 0.5772156649015329);
  CHECK(std::abs(bessel_y0(x) - lead) < 1e-8);

  for (double t = 0.02; t < 500.0; t *= 1.3) {
    CHECK(std::abs(bessel_y0(t) - std::cyl_neumann(0.0, t)) <=
          1e-10 * std::max(std::abs(std::cyl_neumann(0.0, t)), 1e-3));
    CHECK(rel(bessel_k0(t), std::cyl_bessel_k(0.0, t)) < 1e-10);
  }
}

TEST_CASE("Wronskian J0 Y0' - J0' Y0 = 2/(pi x)") {
  for (double x = 0.1; x <= 100.0; x *= 1.25) {
    const double h = 1e-5 * std::min(1.0, x);
    const double dj = (bessel_j0(x + h) - bessel_j0(x - h)) / (2 * h);
    const double dy = (bessel_y0(x + h) - bessel_y0(x - h)) / (2 * h);
    const double w = bessel_j0(x) * dy - dj * bessel_y0(x);
    CAPTURE(x);
    CHECK(rel(w, 2.0 / (std::numbers::pi * x)) < 1e-8);
  }
}

TEST_CASE("Bessel domain errors") {
  CHECK_THROWS_AS(bessel_j(-1, 1.0), DomainError);
  CHECK_THROWS_AS(bessel_j(65, 1.0), DomainError);
  CHECK_THROWS_AS(bessel_j(0, -1.0), DomainError);
  CHECK_THROWS_AS(bessel_j(0, 2e6), DomainError);
  CHECK_THROWS_AS(bessel_y0(0.0), DomainError);
  CHECK_THROWS_AS(bessel_k0(-2.0), DomainError);
}

TEST_CASE("normal cdf") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(40.0) == 1.0);
  CHECK(std::abs(normal_cdf(1.0) - 0.841344746068542948585) < 1e-13);
  CHECK(std::abs(normal_cdf(-5.0) - 2.86651571879193911673752e-7) < 1e-16);
  double prev = 0.0;
  for (double x = -8.0; x <= 8.0; x += 1.0 / 64) {
    CHECK(std::abs(normal_cdf(x) + normal_cdf(-x) - 1.0) < 1e-14);
    CHECK(normal_cdf(x) >= prev);
    prev = normal_cdf(x);
  }
  for (double p : {1e-9, 0.01, 0.3, 0.5, 0.77, 0.999}) {
    CHECK(std::abs(normal_cdf(normal_quantile(p)) - p) < 1e-13 * std::max(1.0, p / 1e-3));
  }
}

TEST_CASE("adaptive quadrature") {
  auto one = adaptive_quad([](double) { return 1.0; }, 0.0, 1.0, 1e-12);
  CHECK(one.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(one.evaluations >= 1);
  CHECK(one.error_estimate >= 0.0);

  auto osc = adaptive_quad([](double x) { return std::sin(1e4 * x); }, 0.0, 1.0, 1e-12,
                           2 * std::numbers::pi / 1e4);
  CHECK(std::abs(osc.value - (1.0 - std::cos(1e4)) / 1e4) < 1e-12);

  // Simpson oracle on 10^6 panels.
  auto f = [](double y) {
    const double s = std::sin(2 * std::numbers::pi * y);
    return s * s / (y * y);
  };
  const double a = 0.01, b = 10.0;
  const int n = 1'000'000;
  const double h = (b - a) / n;
  long double simpson = f(a) + f(b);
  for (int i = 1; i < n; ++i) simpson += (i % 2 ? 4.0L : 2.0L) * f(a + i * h);
  simpson *= h / 3;
  auto res = adaptive_quad(f, a, b, 1e-11, 1.0);
  CHECK(std::abs(res.value - static_cast<double>(simpson)) < 1e-9);
  // Tail of the full identity int_0^inf = pi^2: [0,0.01] ~ 4 pi^2 0.01, [10,inf) ~ 1/20.
  CHECK(std::abs(res.value - std::numbers::pi * std::numbers::pi) < 0.5);

  auto again = adaptive_quad(f, a, b, 1e-11, 1.0);
  CHECK(again.value == res.value);
  CHECK(again.evaluations == res.evaluations);

  CHECK_THROWS_AS(adaptive_quad(f, 1.0, 1.0, 1e-6), DomainError);
  CHECK_THROWS_AS(adaptive_quad(f, 1.0, 2.0, 0.0), DomainError);
  QuadOptions tight;
  tight.abs_tol = 1e-300;
  tight.max_subdivisions = 10;
  const std::vector<double> ends{0.0, 1.0};
  try {
    adaptive_quad([](double x) { return std::sqrt(x); }, std::span<const double>(ends), tight);
    FAIL("expected AccuracyError");
  } catch (const AccuracyError& e) {
    CHECK(e.best_estimate() == doctest::Approx(2.0 / 3.0).epsilon(1e-3));
  }
}
