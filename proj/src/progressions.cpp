#include "ntdist/progressions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ntdist/errors.hpp"
#include "ntdist/io.hpp"
#include "ntdist/kloosterman.hpp"
#include "ntdist/parallel.hpp"
#include "ntdist/quadrature.hpp"

namespace ntdist::progressions {

namespace {

constexpr double kPi = std::numbers::pi;
using arith::kEulerGamma;

double divisor_norm(double scale, double phi) {
  return std::sqrt(2.0 / (kPi * kPi) * scale * std::pow(std::log(phi + 2.0), 3));
}

std::uint64_t floor_x(double X) { return static_cast<std::uint64_t>(std::floor(X)); }

// Per-residue sums of f(n) over lo <= n <= hi, each in pairwise order.
template <class F>
std::vector<double> residue_sums(std::uint64_t p, std::uint64_t lo, std::uint64_t hi, F f) {
  std::vector<double> out(p, 0.0);
  if (hi < lo) return out;
#pragma omp parallel
  {
    std::vector<double> terms;
#pragma omp for schedule(dynamic, 8)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(p); ++r) {
      terms.clear();
      std::uint64_t n = lo + (static_cast<std::uint64_t>(r) + p - lo % p) % p;
      for (; n <= hi; n += p) terms.push_back(f(n));
      out[r] = pairwise_sum(terms);
    }
  }
  return out;
}

}  // namespace

void ProgressionConfig::validate(const Coefficients& c) const {
  if (!kloosterman::is_prime(p)) throw DomainError("p = " + std::to_string(p) + " is not prime");
  if (!(phi >= 1.0) || !std::isfinite(phi)) throw DomainError("phi must be >= 1");
  if (X() < static_cast<double>(p)) throw DomainError("X = p^2/phi must be >= p (phi <= p)");
  if (c.mode() != mode) throw DomainError("coefficient table does not match the configured mode");
  if (mode == Mode::hecke && !(cf_value > 0.0)) throw DomainError("hecke mode needs cf_value > 0");
  if (floor_x(X()) > c.limit()) {
    throw CapacityError("coefficient table limit " + std::to_string(c.limit()) + " below X = " +
                        std::to_string(floor_x(X())));
  }
}

ProgressionResult sharp_progression_values(const ProgressionConfig& cfg, const Coefficients& c) {
  cfg.validate(c);
  const std::uint64_t p = cfg.p;
  const double X = cfg.X();
  const std::uint64_t N = floor_x(X);
  const double pd = static_cast<double>(p);
  ProgressionResult r;
  r.config = cfg;
  r.config.window.reset();
  std::vector<double> S(p);
  if (cfg.mode == Mode::divisor) {
    const auto& t = *c.divisor();
    std::vector<std::uint64_t> exact(p, 0);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t res = 0; res < static_cast<std::int64_t>(p); ++res) {
      std::uint64_t acc = 0;
      for (std::uint64_t n = res == 0 ? p : static_cast<std::uint64_t>(res); n <= N; n += p) acc += t.d(n);
      exact[res] = acc;
    }
    for (std::uint64_t i = 0; i < p; ++i) S[i] = static_cast<double>(exact[i]);
    r.mean_term = static_cast<double>(t.prefix(N)) / pd -
                  X / (pd * pd) * (std::log(X) - 1.0 + 2.0 * kEulerGamma - 2.0 * std::log(pd));
    r.normalization = divisor_norm(X / pd, cfg.phi);
  } else {
    const auto& t = *c.hecke();
    S = residue_sums(p, 1, N, [&](std::uint64_t n) { return t.rho(n); });
    r.mean_term = t.prefix(N) / pd;
    r.normalization = std::sqrt(cfg.cf_value * X / pd);
  }
  r.sums.assign(S.begin() + 1, S.end());
  r.values.resize(p - 1);
  for (std::uint64_t a = 1; a < p; ++a) r.values[a - 1] = (S[a] - r.mean_term) / r.normalization;
  return r;
}

ProgressionResult smoothed_progression_values(const ProgressionConfig& cfg, const Coefficients& c) {
  cfg.validate(c);
  if (!cfg.window) throw DomainError("smoothed values need a window");
  const auto& w = *cfg.window;
  const std::uint64_t p = cfg.p;
  const double X = cfg.X();
  const double pd = static_cast<double>(p);
  const auto pts = w.breakpoints();
  const auto lo = static_cast<std::uint64_t>(std::max(1.0, std::ceil(pts.front() * X)));
  const std::uint64_t hi = floor_x(X);

  const auto S = residue_sums(p, lo, hi, [&](std::uint64_t n) {
    return c(n) * windows::window_eval(w, static_cast<double>(n) / X);
  });
  const double total = pairwise_sum(S);

  ProgressionResult r;
  r.config = cfg;
  r.window_norm = std::sqrt(windows::window_norm_sq(w));
  if (cfg.mode == Mode::divisor) {
    special::QuadOptions opt;
    opt.abs_tol = 1e-15;
    const double log_moment =
        special::adaptive_quad([&](double u) { return std::log(u) * windows::window_eval(w, u); },
                               std::span<const double>(pts), opt)
            .value;
    const double integral =
        (std::log(X) + 2.0 * kEulerGamma - 2.0 * std::log(pd)) * windows::window_integral(w) + log_moment;
    r.mean_term = total / pd - X / (pd * pd) * integral;
    r.normalization = r.window_norm * divisor_norm(X / pd, cfg.phi);
  } else {
    r.mean_term = total / pd;
    r.normalization = r.window_norm * std::sqrt(cfg.cf_value * X / pd);
  }
  r.sums.assign(S.begin() + 1, S.end());
  r.values.resize(p - 1);
  for (std::uint64_t a = 1; a < p; ++a) r.values[a - 1] = (S[a] - r.mean_term) / r.normalization;
  return r;
}

DualResult voronoi_dual(const ProgressionConfig& cfg, const Coefficients& c, double tol,
                        const DualOptions& opt) {
  cfg.validate(c);
  if (!cfg.window) throw DomainError("dual evaluation needs a window");
  if (!(tol > 0.0)) throw DomainError("tol must be > 0");
  const double Y = cfg.Y();
  if (!(Y > 2.0)) throw DomainError("dual evaluation needs Y = p^2/X > 2");
  if (opt.envelope_a_min < 3 || opt.envelope_a_max < opt.envelope_a_min) {
    throw DomainError("envelope exponents must satisfy 3 <= a_min <= a_max");
  }
  const auto& w = *cfg.window;
  const std::uint64_t p = cfg.p;
  const double pd = static_cast<double>(p);
  const bool divisor = cfg.mode == Mode::divisor;

  DualResult out;
  const double norm = std::sqrt(windows::window_norm_sq(w));
  out.sigma = divisor ? norm * std::sqrt(2.0 / (kPi * kPi) * Y * std::pow(std::log(Y + 2.0), 3))
                      : norm * std::sqrt(cfg.cf_value * Y);

  const double xi_cap = std::min({opt.xi_far, 1e6, static_cast<double>(c.limit()) / Y});
  const auto n_far = static_cast<std::uint64_t>(std::floor(xi_cap * Y));
  if (n_far < 1) throw CapacityError("coefficient table too short for the dual sum");
  out.xi_far = static_cast<double>(n_far) / Y;
  const windows::TransformEvaluator eval(w, divisor ? windows::Kernel::divisor : windows::Kernel::hecke,
                                         out.xi_far);

  std::vector<double> b(n_far + 1, 0.0);
#pragma omp parallel for schedule(dynamic, 4096)
  for (std::int64_t n = 1; n <= static_cast<std::int64_t>(n_far); ++n) {
    b[n] = c(static_cast<std::uint64_t>(n)) * eval(static_cast<double>(n) / Y);
  }
  // suffix[k] = sum_{n >= k} |tau(n) B(n/Y)|
  std::vector<double> suffix(n_far + 2, 0.0);
  {
    long double acc = 0;
    for (std::uint64_t n = n_far; n >= 1; --n) {
      acc += std::abs(b[n]);
      suffix[n] = static_cast<double>(acc);
    }
  }

  // Envelope beyond the tabulated range: the exponent giving the smallest tail.
  double far = std::numeric_limits<double>::infinity();
  if (out.xi_far > 4.0 * eval.xi_asymptotic() || out.xi_far > 64.0) {
    for (int A = opt.envelope_a_min; A <= opt.envelope_a_max; ++A) {
      const auto env = windows::calibrate_envelope(eval, A, out.xi_far / 4.0, out.xi_far);
      const double t = divisor ? Y * env.divisor_tail(out.xi_far, Y)
                               : Y * std::sqrt(cfg.cf_value) * env.tail(out.xi_far);
      if (t < far) {
        far = t;
        out.envelope_a = A;
        out.envelope_c = env.C;
      }
    }
  }

  std::vector<double> bneg;
  double neg_tail = 0.0;
  if (divisor) {
    const auto m_neg = static_cast<std::uint64_t>(std::floor(eval.negative_cutoff() * Y));
    if (m_neg > c.limit()) throw CapacityError("coefficient table too short for the negative dual terms");
    out.n_negative = m_neg;
    bneg.assign(m_neg + 1, 0.0);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t m = 1; m <= static_cast<std::int64_t>(m_neg); ++m) {
      bneg[m] = c(static_cast<std::uint64_t>(m)) * eval(-static_cast<double>(m) / Y);
    }
    const double cut = eval.negative_cutoff();
    neg_tail = Y * special::adaptive_quad(
                       [&](double t) {
                         return (std::log(Y * t) + 2.0 * kEulerGamma + 1.0) * eval.negative_bound(t);
                       },
                       cut, 4.0 * cut, 1e-30)
                       .value;
  }

  auto tail_at = [&](std::uint64_t N) { return 2.0 / out.sigma * (suffix[N + 1] + far + neg_tail); };
  std::uint64_t N = n_far;
  if (tail_at(N) <= tol) {
    while (N > 0 && tail_at(N - 1) <= tol) --N;
    out.tol_met = true;
  }
  out.n_truncation = N;
  out.tail_bound = tail_at(N);

  // T(r): dual terms grouped by the residue entering the Kloosterman sum.
  std::vector<double> T = residue_sums(p, 1, N, [&](std::uint64_t n) { return b[n]; });
  if (divisor) {
    const auto neg = residue_sums(p, 1, out.n_negative, [&](std::uint64_t m) { return bneg[m]; });
    for (std::uint64_t r = 0; r < p; ++r) T[(p - r) % p] += neg[r];
  }

  const kloosterman::KloostermanTable K(static_cast<std::uint32_t>(p));
  const double scale = 1.0 / (out.sigma * std::sqrt(pd));
  out.values.assign(p - 1, 0.0);
#pragma omp parallel
  {
    std::vector<double> terms(p);
#pragma omp for schedule(static)
    for (std::int64_t a = 1; a < static_cast<std::int64_t>(p); ++a) {
      for (std::uint64_t r = 0; r < p; ++r) terms[r] = T[r] * K.sum(a, static_cast<std::int64_t>(r));
      out.values[a - 1] = scale * pairwise_sum(terms);
    }
  }
  return out;
}

double voronoi_dual_eval(const ProgressionConfig& cfg, const Coefficients& c, std::uint64_t a,
                         double tol, const DualOptions& opt) {
  if (a < 1 || a >= cfg.p) throw DomainError("residue a must lie in 1..p-1");
  const auto r = voronoi_dual(cfg, c, tol, opt);
  const double v = r.values[a - 1];
  if (!r.tol_met) {
    throw AccuracyError("dual tail bound exceeds tol within the coefficient table", v, r.tail_bound);
  }
  return v;
}

double regime_delta(std::uint64_t p, double X) {
  const double pd = static_cast<double>(p);
  return std::sqrt(pd / X) * std::pow(pd * X, -0.01);
}

double sharp_smooth_gap(const ProgressionConfig& cfg, const Coefficients& c, double delta) {
  if (!(2.0 * static_cast<double>(cfg.p) / cfg.X() <= delta)) {
    throw DomainError("sharp_smooth_gap needs 2p/X <= delta");
  }
  ProgressionConfig smooth = cfg;
  smooth.window = windows::WindowSpec::single(delta);
  const auto sharp = sharp_progression_values(cfg, c);
  const auto sm = smoothed_progression_values(smooth, c);
  std::vector<double> diff(sharp.values.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = std::abs(sharp.values[i] - sm.values[i]);
  return pairwise_sum(diff) / static_cast<double>(diff.size());
}

stats::EmpiricalDistribution progression_experiment(const ProgressionConfig& cfg, const Coefficients& c) {
  return stats::EmpiricalDistribution(sharp_progression_values(cfg, c).values);
}

std::string to_csv(const ProgressionResult& r) {
  std::ostringstream out;
  out << "a,S,E\n";
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    out << i + 1 << ',' << io::format_double(r.sums[i]) << ',' << io::format_double(r.values[i]) << '\n';
  }
  return out.str();
}

}  // namespace ntdist::progressions
