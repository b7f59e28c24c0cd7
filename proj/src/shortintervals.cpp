#include "ntdist/shortintervals.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ntdist/errors.hpp"
#include "ntdist/io.hpp"
#include "ntdist/parallel.hpp"
#include "ntdist/rng.hpp"

namespace ntdist::shortintervals {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSeriesScale = 1.0 / (kPi * std::numbers::sqrt2);

void check_table(const Coefficients& c, std::uint64_t n) {
  if (n > c.limit()) {
    throw CapacityError("coefficient table limit " + std::to_string(c.limit()) + " below " + std::to_string(n));
  }
}

double hecke_at(const arith::HeckeTable& t, double x) {
  if (x < 1.0) return 0.0;
  const auto n = static_cast<std::uint64_t>(std::floor(x));
  if (n > t.limit()) {
    throw CapacityError("Hecke table limit " + std::to_string(t.limit()) + " below " + std::to_string(n));
  }
  return t.prefix(n);
}

// Fractional part of k sqrt(n) + offset, in extended precision so that
// phases near 1e6 radians keep ~1e-13 absolute accuracy.
double cycles(long double k, std::int64_t n, long double offset) {
  const long double u = k * std::sqrt(static_cast<long double>(n)) + offset;
  return static_cast<double>(u - std::floor(u));
}

}  // namespace

double Summatory::remainder(double x) const {
  if (hecke_) return hecke_at(*hecke_, x);
  return arith::delta_remainder(x).remainder;
}

double Summatory::increment(double x1, double x2) const {
  if (hecke_) return hecke_at(*hecke_, x2) - hecke_at(*hecke_, x1);
  if (!(x1 >= 1.0 && x2 >= x1)) throw DomainError("increment needs 1 <= x1 <= x2");
  const double h = x2 - x1;
  const auto d = static_cast<double>(arith::divisor_summatory(x2) - arith::divisor_summatory(x1));
  // x2 (log x2 + c) - x1 (log x1 + c) = h (log x2 + c) + x1 log(x2 / x1)
  const double main = h * (std::log(x2) + 2.0 * arith::kEulerGamma - 1.0) + x1 * std::log1p(h / x1);
  return d - main;
}

double Summatory::F(double x) const {
  if (!(x > 0.0)) throw DomainError("F(x) needs x > 0");
  return remainder(x) / std::pow(x, 0.25);
}

double remainder_series(double x, std::uint64_t N, const Coefficients& c) {
  if (N < 1) throw DomainError("series needs N >= 1");
  if (!(x > 0.0)) throw DomainError("series needs x > 0");
  check_table(c, N);
  std::vector<double> terms(N);
  const long double sx = std::sqrt(static_cast<long double>(x));
#pragma omp parallel for schedule(static)
  for (std::int64_t n = 1; n <= static_cast<std::int64_t>(N); ++n) {
    const double dn = static_cast<double>(n);
    terms[n - 1] = c(n) * std::pow(dn, -0.75) * std::cos(2.0 * kPi * cycles(2.0L * sx, n, -0.125L));
  }
  return kSeriesScale * pairwise_sum(terms);
}

double short_stat_exact(double x, double L, const Summatory& s) {
  if (!(x >= 1.0)) throw DomainError("short_stat_exact needs x >= 1");
  const double L_min = s.mode() == Mode::hecke ? 1.0 : 2.0;
  if (!(L >= L_min)) throw DomainError("short_stat_exact needs L >= " + std::to_string(L_min));
  const double r = std::sqrt(x) + 1.0 / L;
  const double x2 = r * r;
  // F(x2) - F(x) = (R(x2) - R(x)) / x2^{1/4} + R(x) (x2^{-1/4} - x^{-1/4})
  const double q2 = std::pow(x2, -0.25), q1 = std::pow(x, -0.25);
  return s.increment(x, x2) * q2 + s.remainder(x) * (q2 - q1);
}

double short_sum(double x, double L, std::uint64_t M, const Coefficients& c) {
  if (M < 1) throw DomainError("short_sum needs M >= 1");
  if (!(L > 0.0) || !(x > 0.0)) throw DomainError("short_sum needs x, L > 0");
  check_table(c, M);
  std::vector<double> terms(M);
  const long double shift = std::sqrt(static_cast<long double>(x)) + 0.5L / L;
#pragma omp parallel for schedule(static)
  for (std::int64_t n = 1; n <= static_cast<std::int64_t>(M); ++n) {
    const double sn = std::sqrt(static_cast<double>(n));
    terms[n - 1] = c(n) * std::pow(static_cast<double>(n), -0.75) * std::sin(2.0 * kPi * sn / L) *
                   std::sin(2.0 * kPi * cycles(2.0L * shift, n, -0.125L));
  }
  return -2.0 * kSeriesScale * pairwise_sum(terms);
}

double sigma_sq_M(std::uint64_t M, double L, const Coefficients& c) {
  if (M < 1) throw DomainError("sigma_sq_M needs M >= 1");
  if (!(L > 0.0)) throw DomainError("sigma_sq_M needs L > 0");
  check_table(c, M);
  std::vector<double> terms(M);
#pragma omp parallel for schedule(static)
  for (std::int64_t n = 1; n <= static_cast<std::int64_t>(M); ++n) {
    const double t = c(n);
    const double s = std::sin(2.0 * kPi * std::sqrt(static_cast<double>(n)) / L);
    terms[n - 1] = t * t * std::pow(static_cast<double>(n), -1.5) * s * s;
  }
  return pairwise_sum(terms) / (kPi * kPi);
}

double sigma_sq_asymptotic(double L, Mode mode, double cf_value) {
  if (!(L > 1.0)) throw DomainError("sigma_sq_asymptotic needs L > 1");
  if (mode == Mode::hecke) {
    if (!(cf_value > 0.0)) throw DomainError("hecke mode needs cf_value > 0");
    return 2.0 * cf_value / L;
  }
  return 16.0 / (kPi * kPi) * std::pow(std::log(L), 3) / L;
}

double theorem_statistic(double x, double L, const Summatory& s, double cf_value) {
  if (!(x >= 1.0)) throw DomainError("theorem_statistic needs x >= 1");
  if (!(L > 1.0)) throw DomainError("theorem_statistic needs L > 1");
  const double num = s.increment(x, x + std::sqrt(x) / L);
  double scale;
  if (s.mode() == Mode::hecke) {
    if (!(cf_value > 0.0)) throw DomainError("hecke mode needs cf_value > 0");
    scale = std::sqrt(cf_value / L);
  } else {
    scale = std::sqrt(8.0 / (kPi * kPi) * std::pow(std::log(L), 3) / L);
  }
  return num / (std::pow(x, 0.25) * scale);
}

void ShortIntervalConfig::validate(const Summatory& s) const {
  if (!(T >= 1e4) || !std::isfinite(T)) throw DomainError("T must be >= 1e4");
  const double L_min = mode == Mode::hecke ? 1.0 : 2.0;
  if (!(L >= L_min) || !std::isfinite(L)) throw DomainError("L must be >= " + std::to_string(L_min));
  if (s.mode() != mode) throw DomainError("summatory data does not match the configured mode");
  if (mode == Mode::hecke) {
    if (!(cf_value > 0.0)) throw DomainError("hecke mode needs cf_value > 0");
    const double r = std::sqrt(2.0 * T) + 1.0 / L;
    const double need = std::max(r * r, 2.0 * T + std::sqrt(2.0 * T) / L);
    if (need > static_cast<double>(s.table()->limit())) {
      throw CapacityError("Hecke table limit " + std::to_string(s.table()->limit()) + " below " +
                          std::to_string(static_cast<std::uint64_t>(need)) + " needed for T");
    }
  }
}

std::vector<std::string> ShortIntervalConfig::warnings() const {
  std::vector<std::string> out;
  if (L > std::pow(T, 0.2)) out.push_back("L exceeds T^0.2; log L is not small against log T");
  if (samples < 2) out.push_back("fewer than two samples; variance is degenerate");
  return out;
}

double sample_point(const ShortIntervalConfig& cfg, std::size_t i) {
  const Philox4x32 gen(cfg.seed ^ mix64(i));
  return cfg.T + cfg.T * gen.uniform(0, 0);
}

namespace {

template <class F>
SampleSet sample(const ShortIntervalConfig& cfg, F stat) {
  SampleSet out;
  out.x.resize(cfg.samples);
  out.statistic.resize(cfg.samples);
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(cfg.samples); ++i) {
    try {
      out.x[i] = sample_point(cfg, static_cast<std::size_t>(i));
      out.statistic[i] = stat(out.x[i]);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace

VarianceResult variance_experiment(const ShortIntervalConfig& cfg, const Summatory& s) {
  cfg.validate(s);
  VarianceResult r;
  r.samples = sample(cfg, [&](double x) { return short_stat_exact(x, cfg.L, s); });
  r.degenerate = cfg.samples < 2;
  if (!r.degenerate) {
    r.sample_variance = stats::variance(stats::EmpiricalDistribution(r.samples.statistic));
  }
  r.ratio_to_asymptotic = r.sample_variance / sigma_sq_asymptotic(cfg.L, cfg.mode, cfg.cf_value);
  return r;
}

DistributionResult distribution_experiment(const ShortIntervalConfig& cfg, const Summatory& s) {
  cfg.validate(s);
  if (cfg.samples == 0) throw DomainError("distribution experiment needs at least one sample");
  auto set = sample(cfg, [&](double x) { return theorem_statistic(x, cfg.L, s, cfg.cf_value); });
  stats::EmpiricalDistribution d(set.statistic);
  return {std::move(set), std::move(d)};
}

std::string to_csv(const SampleSet& s) {
  std::ostringstream out;
  out << "x,statistic\n";
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    out << io::format_double(s.x[i]) << ',' << io::format_double(s.statistic[i]) << '\n';
  }
  return out.str();
}

}  // namespace ntdist::shortintervals
