#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace ntdist::windows {

enum class WindowKind { single, difference };

/// w_delta (single) or phi_{delta,eps} = w_delta - w_eps (difference).
struct WindowSpec {
  WindowKind kind = WindowKind::single;
  double delta = 0.1;
  double epsilon = 0.0;

  /// Throws DomainError unless 0 < delta <= 1/4 (the closed end keeps the plateau [1/2, 3/4]).
  static WindowSpec single(double delta);
  /// Throws DomainError unless 0 < delta < eps < 1/4.
  static WindowSpec difference(double delta, double epsilon);

  /// Ends of the smooth pieces of the window, ascending, within [delta, 1].
  std::vector<double> breakpoints() const;
};

/// h(t)/(h(t)+h(1-t)) with h(t) = exp(-1/t) for t > 0, else 0.
double bump_g(double t);

double window_eval(const WindowSpec& spec, double x);

/// Integral of w^2 over its support.
double window_norm_sq(const WindowSpec& spec);

/// Integral of w over its support.
double window_integral(const WindowSpec& spec);

struct TransformValue {
  double xi = 0.0;
  double value = 0.0;
  double quad_error = 0.0;
};

/// Divisor transform: -2 pi int w(u) Y0(4 pi sqrt(xi u)) du for xi > 0,
/// 4 int w(u) K0(4 pi sqrt(|xi| u)) du for xi < 0. Direct quadrature.
TransformValue transform_d(const WindowSpec& spec, double xi, double tol = 1e-9);

/// Cusp-form transform: 2 pi i^k int w(u) J_{k-1}(4 pi sqrt(xi u)) du, xi > 0.
/// Only k = 12 is accepted.
TransformValue transform_f(const WindowSpec& spec, int k, double xi, double tol = 1e-9);

enum class Kernel { divisor, hecke };

/// Fast evaluation of the transforms for many xi. Three regimes:
///   |xi| < 16                 direct quadrature
///   16 <= |xi| < xi_asymptotic  piecewise Chebyshev in s = sqrt(|xi|)
///   xi >= xi_asymptotic        Hankel expansion of the kernel, with the
///                              window's Fourier integrals from one FFT
/// The asymptotic crossover keeps 4 pi sqrt(xi delta) >= 120, where twelve
/// terms of the expansion are below 1e-16 relative for J_11 and Y_0.
/// Negative xi (divisor kernel only) uses direct/Chebyshev evaluation and is
/// set to zero past the point where 4 K0(4 pi sqrt(|xi| delta)) < 1e-22.
class TransformEvaluator {
 public:
  TransformEvaluator(const WindowSpec& spec, Kernel kernel, double xi_max);

  double operator()(double xi) const;

  const WindowSpec& spec() const noexcept { return spec_; }
  Kernel kernel() const noexcept { return kernel_; }
  double xi_max() const noexcept { return xi_max_; }
  double xi_asymptotic() const noexcept { return xi_asym_; }
  /// |B(-xi)| <= 4 (1 - delta) K0(4 pi sqrt(xi delta)); zero for the cusp kernel.
  double negative_bound(double xi_abs) const;
  /// |xi| beyond which negative-side values are treated as zero.
  double negative_cutoff() const noexcept { return neg_cutoff_; }

  static constexpr int kHankelTerms = 12;
  static constexpr double kChebyshevStart = 4.0;  // in s = sqrt(|xi|)
  static constexpr double kPanelWidth = 0.25;
  static constexpr int kChebyshevDegree = 16;

 private:
  struct ChebyshevPanels {
    double s_lo = 0.0, s_hi = 0.0;
    std::vector<std::array<double, kChebyshevDegree + 1>> coeffs;
    bool covers(double s) const { return s >= s_lo && s < s_hi; }
    double eval(double s) const;
  };

  double direct(double xi) const;
  void build_chebyshev(ChebyshevPanels& panels, double s_hi, double sign);
  void build_fft();
  double asymptotic(double xi) const;

  WindowSpec spec_;
  Kernel kernel_;
  double xi_max_;
  double xi_asym_;
  double neg_cutoff_;
  ChebyshevPanels pos_;
  ChebyshevPanels neg_;

  // Demodulated Fourier integrals F_k(r_j) exp(-i r_j v_c) on r_j = j dr.
  double dr_ = 0.0;
  double v_center_ = 0.0;
  std::vector<std::vector<std::complex<double>>> fourier_;
  std::array<double, kHankelTerms> hankel_a_{};
  double phase_ = 0.0;
  bool use_imag_ = false;
  double prefactor_ = 0.0;
};

/// |B(xi)| <= C xi^{-A/2-1/4} delta^{1-A}, with C calibrated empirically.
struct DecayEnvelope {
  int A = 3;
  double C = 0.0;
  double delta = 0.0;
  double bound(double xi) const;
  /// Integral of bound(t) (log t + log y_scale + 2 gamma) dt over [xi0, inf),
  /// a proxy for the omitted d(n)-weighted tail at scale Y.
  double divisor_tail(double xi0, double y_scale) const;
  /// Integral of bound(t) over [xi0, inf).
  double tail(double xi0) const;
};

/// Calibrates C for exponent A as the maximum of |B(xi)| xi^{A/2+1/4} delta^{A-1}
/// on a grid of xi in [xi_lo, xi_hi] fine enough to sample each oscillation.
DecayEnvelope calibrate_envelope(const TransformEvaluator& eval, int A, double xi_lo,
                                 double xi_hi);

struct PlancherelResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_err = 0.0;
  /// Estimate of int_{|xi| > Xi} B^2 from the A = 2 envelope.
  double tail_estimate = 0.0;
  std::size_t grid_points = 0;
};

/// Compares int_{-Xi}^{Xi} B_d(phi)^2 (trapezoid in s = sqrt|xi| with step
/// grid_step, skipping |xi| < 1e-6) with int phi^2.
PlancherelResult plancherel_check(double delta, double epsilon, double Xi, double grid_step);

}  // namespace ntdist::windows
