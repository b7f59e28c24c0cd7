#include "ntdist/windows.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ntdist/arith.hpp"
#include "ntdist/errors.hpp"
#include "ntdist/parallel.hpp"
#include "ntdist/quadrature.hpp"
#include "ntdist/special.hpp"

namespace ntdist::windows {

namespace {

constexpr double kPi = std::numbers::pi;

// z = 4 pi sqrt(xi delta) at the asymptotic crossover.
constexpr double kAsymptoticArgument = 120.0;
// 4 K0(z) < 1e-22 once z >= 50.
constexpr double kNegativeArgument = 50.0;

constexpr double kFftStep = 1.0 / 16384.0;  // dv
constexpr std::size_t kFftSize = std::size_t{1} << 19;
constexpr int kInterpPoints = 12;
constexpr double kMaxXi = 1e6;

bool in_range(double lo, double x, double hi) { return x > lo && x < hi; }

std::vector<double> transform_breakpoints(const WindowSpec& spec, double xi) {
  auto pts = spec.breakpoints();
  if (xi > 0.0) {
    // Equal-phase cuts every half wave of the Bessel kernel, z_j = j pi.
    const double lo = pts.front();
    const double hi = pts.back();
    const auto j0 = static_cast<long>(std::ceil(4.0 * std::sqrt(xi * lo)));
    const auto j1 = static_cast<long>(std::floor(4.0 * std::sqrt(xi * hi)));
    for (long j = j0; j <= j1; ++j) {
      const double u = static_cast<double>(j) * j / (16.0 * xi);
      if (in_range(lo, u, hi)) pts.push_back(u);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  }
  return pts;
}

special::QuadratureResult integrate_window(const WindowSpec& spec, double xi, double tol,
                                           auto&& kernel) {
  const auto pts = transform_breakpoints(spec, xi);
  special::QuadOptions opt;
  opt.abs_tol = tol;
  return special::adaptive_quad([&](double u) { return window_eval(spec, u) * kernel(u); },
                                std::span<const double>(pts), opt);
}

// a_k(nu) = prod_{j<=k} (4 nu^2 - (2j-1)^2) / (k! 8^k)
std::array<double, TransformEvaluator::kHankelTerms> hankel_coefficients(int nu) {
  std::array<double, TransformEvaluator::kHankelTerms> a{};
  const double mu = 4.0 * nu * nu;
  a[0] = 1.0;
  for (int k = 1; k < TransformEvaluator::kHankelTerms; ++k) {
    const double odd = 2.0 * k - 1.0;
    a[k] = a[k - 1] * (mu - odd * odd) / (8.0 * k);
  }
  return a;
}

}  // namespace

WindowSpec WindowSpec::single(double delta) {
  if (!(delta > 0.0 && delta <= 0.25)) {
    throw DomainError("window delta must lie in (0, 1/4], got " + std::to_string(delta));
  }
  return {WindowKind::single, delta, 0.0};
}

WindowSpec WindowSpec::difference(double delta, double epsilon) {
  if (!(delta > 0.0 && delta < epsilon && epsilon < 0.25)) {
    throw DomainError("difference window needs 0 < delta < eps < 1/4");
  }
  return {WindowKind::difference, delta, epsilon};
}

std::vector<double> WindowSpec::breakpoints() const {
  std::vector<double> pts{delta, 2 * delta, 1 - delta, 1.0};
  if (kind == WindowKind::difference) {
    pts.insert(pts.end(), {epsilon, 2 * epsilon, 1 - epsilon});
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double bump_g(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double e = 1.0 / t - 1.0 / (1.0 - t);
  if (e > 700.0) return 0.0;
  return 1.0 / (1.0 + std::exp(e));
}

namespace {
double single_window(double delta, double x) {
  if (x <= delta || x >= 1.0) return 0.0;
  if (x < 2 * delta) return bump_g((x - delta) / delta);
  if (x <= 1 - delta) return 1.0;
  return bump_g((1.0 - x) / delta);
}
}  // namespace

double window_eval(const WindowSpec& spec, double x) {
  const double w = single_window(spec.delta, x);
  if (spec.kind == WindowKind::single) return w;
  return w - single_window(spec.epsilon, x);
}

double window_norm_sq(const WindowSpec& spec) {
  const auto pts = spec.breakpoints();
  special::QuadOptions opt;
  opt.abs_tol = 1e-15;
  return special::adaptive_quad(
             [&](double u) {
               const double w = window_eval(spec, u);
               return w * w;
             },
             std::span<const double>(pts), opt)
      .value;
}

double window_integral(const WindowSpec& spec) {
  const auto pts = spec.breakpoints();
  special::QuadOptions opt;
  opt.abs_tol = 1e-15;
  return special::adaptive_quad([&](double u) { return window_eval(spec, u); },
                                std::span<const double>(pts), opt)
      .value;
}

TransformValue transform_d(const WindowSpec& spec, double xi, double tol) {
  if (!(xi != 0.0) || !std::isfinite(xi)) throw DomainError("transform_d requires xi != 0");
  if (std::abs(xi) > 6e9) throw DomainError("transform_d: |xi| too large");
  if (!(tol > 0.0)) throw DomainError("transform_d requires tol > 0");
  TransformValue out;
  out.xi = xi;
  try {
    if (xi > 0.0) {
      const double c = 4.0 * kPi * std::sqrt(xi);
      const auto r = integrate_window(spec, xi, tol / (2.0 * kPi),
                                      [&](double u) { return special::bessel_y0(c * std::sqrt(u)); });
      out.value = -2.0 * kPi * r.value;
      out.quad_error = 2.0 * kPi * r.error_estimate;
    } else {
      const double c = 4.0 * kPi * std::sqrt(-xi);
      const auto r = integrate_window(spec, xi, tol / 4.0,
                                      [&](double u) { return special::bessel_k0(c * std::sqrt(u)); });
      out.value = 4.0 * r.value;
      out.quad_error = 4.0 * r.error_estimate;
    }
  } catch (const AccuracyError& e) {
    throw AccuracyError("transform_d quadrature failed at xi = " + std::to_string(xi),
                        e.best_estimate(), e.error_estimate());
  }
  return out;
}

TransformValue transform_f(const WindowSpec& spec, int k, double xi, double tol) {
  if (k != 12) throw UnsupportedError("transform_f: only weight 12 is implemented");
  if (!(xi > 0.0) || !std::isfinite(xi)) throw DomainError("transform_f requires xi > 0");
  if (xi > 6e9) throw DomainError("transform_f: xi too large");
  if (!(tol > 0.0)) throw DomainError("transform_f requires tol > 0");
  const double sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;  // i^k
  const double c = 4.0 * kPi * std::sqrt(xi);
  TransformValue out;
  out.xi = xi;
  try {
    const auto r = integrate_window(spec, xi, tol / (2.0 * kPi),
                                    [&](double u) { return special::bessel_j(k - 1, c * std::sqrt(u)); });
    out.value = sign * 2.0 * kPi * r.value;
    out.quad_error = 2.0 * kPi * r.error_estimate;
  } catch (const AccuracyError& e) {
    throw AccuracyError("transform_f quadrature failed at xi = " + std::to_string(xi),
                        e.best_estimate(), e.error_estimate());
  }
  return out;
}

// ---------------------------------------------------------------------------

double TransformEvaluator::ChebyshevPanels::eval(double s) const {
  const auto i = static_cast<std::size_t>((s - s_lo) / kPanelWidth);
  const auto& c = coeffs[std::min(i, coeffs.size() - 1)];
  const double a = s_lo + kPanelWidth * static_cast<double>(std::min(i, coeffs.size() - 1));
  const double t = 2.0 * (s - a) / kPanelWidth - 1.0;
  double b1 = 0.0, b2 = 0.0;
  for (int j = kChebyshevDegree; j >= 1; --j) {
    const double b0 = 2.0 * t * b1 - b2 + c[j];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + c[0];
}

TransformEvaluator::TransformEvaluator(const WindowSpec& spec, Kernel kernel, double xi_max)
    : spec_(spec), kernel_(kernel), xi_max_(xi_max) {
  if (!(xi_max > 0.0) || xi_max > kMaxXi) {
    throw DomainError("TransformEvaluator: xi_max must lie in (0, 1e6]");
  }
  const double lo = spec_.breakpoints().front();
  xi_asym_ = std::pow(kAsymptoticArgument / (4.0 * kPi), 2) / lo;
  neg_cutoff_ = kernel_ == Kernel::divisor ? std::pow(kNegativeArgument / (4.0 * kPi), 2) / lo : 0.0;

  build_chebyshev(pos_, std::sqrt(std::min(xi_max_, xi_asym_)), 1.0);
  if (kernel_ == Kernel::divisor) build_chebyshev(neg_, std::sqrt(neg_cutoff_), -1.0);
  if (xi_max_ > xi_asym_) build_fft();
}

double TransformEvaluator::direct(double xi) const {
  constexpr double tol = 1e-13;
  if (kernel_ == Kernel::divisor) return transform_d(spec_, xi, tol).value;
  return transform_f(spec_, 12, xi, tol).value;
}

void TransformEvaluator::build_chebyshev(ChebyshevPanels& panels, double s_hi, double sign) {
  panels.s_lo = kChebyshevStart;
  if (s_hi <= kChebyshevStart) {
    panels.s_hi = kChebyshevStart;
    return;
  }
  const auto count = static_cast<std::size_t>(std::ceil((s_hi - kChebyshevStart) / kPanelWidth));
  panels.s_hi = kChebyshevStart + kPanelWidth * static_cast<double>(count);
  panels.coeffs.assign(count, {});
  constexpr int n = kChebyshevDegree + 1;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t p = 0; p < count; ++p) {
    const double a = kChebyshevStart + kPanelWidth * static_cast<double>(p);
    std::array<double, n> f{};
    for (int i = 0; i < n; ++i) {
      const double t = std::cos(kPi * (i + 0.5) / n);
      const double s = a + 0.5 * kPanelWidth * (t + 1.0);
      f[i] = direct(sign * s * s);
    }
    auto& c = panels.coeffs[p];
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += f[i] * std::cos(kPi * j * (i + 0.5) / n);
      c[j] = 2.0 * acc / n;
    }
    c[0] *= 0.5;
  }
}

void TransformEvaluator::build_fft() {
  const double lo = spec_.breakpoints().front();
  v_center_ = 0.5 * (std::sqrt(lo) + 1.0);
  dr_ = 2.0 * kPi / (static_cast<double>(kFftSize) * kFftStep);
  const double r_max = 4.0 * kPi * std::sqrt(xi_max_);
  const auto j_max = static_cast<std::size_t>(std::ceil(r_max / dr_)) + kInterpPoints + 2;
  const auto m_max = static_cast<std::size_t>(1.0 / kFftStep);

  const int nu = kernel_ == Kernel::divisor ? 0 : 11;
  hankel_a_ = hankel_coefficients(nu);
  if (kernel_ == Kernel::divisor) {
    phase_ = 0.25 * kPi;
    use_imag_ = true;
    prefactor_ = -4.0 * kPi;
  } else {
    phase_ = (0.5 * nu + 0.25) * kPi;
    use_imag_ = false;
    prefactor_ = 4.0 * kPi;  // i^12 = 1
  }

  std::vector<double> base(m_max + 1, 0.0);
  for (std::size_t m = 1; m <= m_max; ++m) {
    const double v = static_cast<double>(m) * kFftStep;
    base[m] = window_eval(spec_, v * v);
  }

  fftw_complex* buf = fftw_alloc_complex(kFftSize);
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(kFftSize), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  fourier_.assign(kHankelTerms, std::vector<std::complex<double>>(j_max));
  for (int k = 0; k < kHankelTerms; ++k) {
    for (std::size_t m = 0; m < kFftSize; ++m) {
      buf[m][0] = 0.0;
      buf[m][1] = 0.0;
    }
    for (std::size_t m = 1; m <= m_max; ++m) {
      if (base[m] == 0.0) continue;
      const double v = static_cast<double>(m) * kFftStep;
      buf[m][0] = kFftStep * base[m] * std::pow(v, 0.5 - k);
    }
    fftw_execute(plan);
    for (std::size_t j = 0; j < j_max; ++j) {
      const double r = dr_ * static_cast<double>(j);
      const std::complex<double> f(buf[j][0], buf[j][1]);
      fourier_[k][j] = f * std::polar(1.0, -r * v_center_);
    }
  }
  fftw_destroy_plan(plan);
  fftw_free(buf);
}

double TransformEvaluator::asymptotic(double xi) const {
  const double r = 4.0 * kPi * std::sqrt(xi);
  const double pos = r / dr_;
  auto first = static_cast<long>(std::floor(pos)) - kInterpPoints / 2 + 1;
  first = std::max(first, 0L);
  // Barycentric weights for equispaced nodes: (-1)^i C(n-1, i).
  std::array<double, kInterpPoints> lam{};
  double denom = 0.0;
  bool exact = false;
  std::size_t exact_idx = 0;
  {
    double binom = 1.0;
    for (int i = 0; i < kInterpPoints; ++i) {
      const double d = pos - static_cast<double>(first + i);
      if (d == 0.0) {
        exact = true;
        exact_idx = static_cast<std::size_t>(first + i);
      }
      const double sgn = (i % 2 == 0) ? 1.0 : -1.0;
      lam[i] = exact ? 0.0 : sgn * binom / d;
      denom += lam[i];
      binom = binom * (kInterpPoints - 1 - i) / (i + 1);
    }
  }
  std::complex<double> sum(0.0, 0.0);
  std::complex<double> ik(1.0, 0.0);
  double rk = 1.0;
  for (int k = 0; k < kHankelTerms; ++k) {
    std::complex<double> fk(0.0, 0.0);
    if (exact) {
      fk = fourier_[k][exact_idx];
    } else {
      for (int i = 0; i < kInterpPoints; ++i) fk += lam[i] * fourier_[k][first + i];
      fk /= denom;
    }
    sum += ik * (hankel_a_[k] * rk) * fk;
    ik *= std::complex<double>(0.0, 1.0);
    rk /= r;
  }
  sum *= std::polar(1.0, r * v_center_ - phase_);
  const double part = use_imag_ ? sum.imag() : sum.real();
  return prefactor_ * std::sqrt(2.0 / (kPi * r)) * part;
}

double TransformEvaluator::operator()(double xi) const {
  if (xi == 0.0 || !std::isfinite(xi)) throw DomainError("transform requires xi != 0");
  if (xi < 0.0) {
    if (kernel_ == Kernel::hecke) return 0.0;
    const double s = std::sqrt(-xi);
    if (-xi >= neg_cutoff_) return 0.0;
    if (s < kChebyshevStart) return direct(xi);
    return neg_.eval(s);
  }
  if (xi > xi_max_ * (1.0 + 1e-12)) throw DomainError("TransformEvaluator: xi beyond configured maximum");
  xi = std::min(xi, xi_max_);  // s^2 round-off at the top of a grid
  const double s = std::sqrt(xi);
  if (s < kChebyshevStart) return direct(xi);
  if (pos_.covers(s) && xi < xi_asym_) return pos_.eval(s);
  return asymptotic(xi);
}

double TransformEvaluator::negative_bound(double xi_abs) const {
  if (kernel_ == Kernel::hecke) return 0.0;
  const double lo = spec_.breakpoints().front();
  return 4.0 * (1.0 - lo) * special::bessel_k0(4.0 * kPi * std::sqrt(xi_abs * lo));
}

// ---------------------------------------------------------------------------

double DecayEnvelope::bound(double xi) const {
  return C * std::pow(xi, -0.5 * A - 0.25) * std::pow(delta, 1.0 - A);
}

double DecayEnvelope::tail(double xi0) const {
  const double alpha = 0.5 * A + 0.25;
  return C * std::pow(delta, 1.0 - A) * std::pow(xi0, 1.0 - alpha) / (alpha - 1.0);
}

double DecayEnvelope::divisor_tail(double xi0, double y_scale) const {
  const double alpha = 0.5 * A + 0.25;
  const double base = C * std::pow(delta, 1.0 - A) * std::pow(xi0, 1.0 - alpha);
  const double logs = std::log(xi0 * y_scale) + 2.0 * arith::kEulerGamma;
  return base * (logs / (alpha - 1.0) + 1.0 / ((alpha - 1.0) * (alpha - 1.0)));
}

DecayEnvelope calibrate_envelope(const TransformEvaluator& eval, int A, double xi_lo,
                                 double xi_hi) {
  if (A < 1) throw DomainError("envelope exponent A must be >= 1");
  if (!(xi_lo > 0.0 && xi_lo < xi_hi && xi_hi <= eval.xi_max())) {
    throw DomainError("calibrate_envelope: bad xi range");
  }
  DecayEnvelope env;
  env.A = A;
  env.delta = eval.spec().delta;
  // Oscillation period in s = sqrt(xi) is at least 1/2; sample 25 points per period.
  const double s_lo = std::sqrt(xi_lo), s_hi = std::sqrt(xi_hi);
  const auto n = static_cast<std::size_t>(std::ceil((s_hi - s_lo) / 0.02)) + 1;
  std::vector<double> ratio(n);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::min(s_hi, s_lo + 0.02 * static_cast<double>(i));
    const double xi = s * s;
    ratio[i] = std::abs(eval(xi)) * std::pow(xi, 0.5 * A + 0.25) * std::pow(env.delta, A - 1.0);
  }
  env.C = *std::max_element(ratio.begin(), ratio.end());
  return env;
}

PlancherelResult plancherel_check(double delta, double epsilon, double Xi, double grid_step) {
  if (!(delta > 0.0 && delta < epsilon && epsilon < 0.25)) {
    throw DomainError("plancherel_check needs 0 < delta < eps < 1/4");
  }
  if (!(Xi >= 1e3)) throw DomainError("plancherel_check needs Xi >= 1e3");
  if (!(grid_step > 0.0)) throw DomainError("plancherel_check needs grid_step > 0");
  const auto spec = WindowSpec::difference(delta, epsilon);
  const TransformEvaluator eval(spec, Kernel::divisor, Xi);

  // Trapezoid in t = log s on [1e-3, 1] (the log singularity at 0 is mild in
  // t) and in s = sqrt|xi| on [1, sqrt Xi]; d xi = 2 s ds = 2 s^2 dt.
  constexpr double hole = 1e-6;
  const double t0 = 0.5 * std::log(hole);
  const double s1 = std::sqrt(Xi);
  const auto n_log = static_cast<std::size_t>(std::ceil(-t0 / grid_step));
  const auto n_lin = static_cast<std::size_t>(std::ceil((s1 - 1.0) / grid_step));
  const double h_log = -t0 / static_cast<double>(n_log);
  const double h_lin = (s1 - 1.0) / static_cast<double>(n_lin);
  auto both = [&](double s) {
    const double bp = eval(s * s);
    const double bm = eval(-s * s);
    return bp * bp + bm * bm;
  };
  std::vector<double> terms(n_log + n_lin + 2);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i <= n_log) {
      const double t = (i == n_log) ? 0.0 : t0 + h_log * static_cast<double>(i);
      const double s = std::exp(t);
      const double weight = (i == 0 || i == n_log) ? 0.5 : 1.0;
      terms[i] = weight * h_log * 2.0 * s * s * both(s);
    } else {
      const std::size_t j = i - n_log - 1;
      const double s = (j == n_lin) ? s1 : 1.0 + h_lin * static_cast<double>(j);
      const double weight = (j == 0 || j == n_lin) ? 0.5 : 1.0;
      terms[i] = weight * h_lin * 2.0 * s * both(s);
    }
  }
  PlancherelResult out;
  out.grid_points = 2 * terms.size();
  out.lhs = pairwise_sum(terms);
  out.rhs = window_norm_sq(spec);
  out.rel_err = std::abs(out.lhs - out.rhs) / out.rhs;

  const auto env = calibrate_envelope(eval, 2, 0.1 * Xi, Xi);
  // int_Xi^inf (C xi^{-5/4} / delta)^2 dxi
  out.tail_estimate = env.C * env.C / (delta * delta) * std::pow(Xi, -1.5) / 1.5;
  return out;
}

}  // namespace ntdist::windows
