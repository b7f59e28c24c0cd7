#pragma once

namespace ntdist::special {

/// Below this argument J_0, J_1, Y_0 use long-double power series; above it
/// the Hankel asymptotic expansion. The smallest asymptotic term at the
/// crossover is e^{-2x} ~ 1e-14 relative; the series loses at most ~6 of its
/// 19 digits there. Validated against 40-term extended-precision oracles.
inline constexpr double kSeriesAsymptoticCrossover = 16.0;

/// Below this argument K_0 uses the trapezoid rule on
/// K_0(x) = int_0^inf exp(-x cosh t) dt, above it the asymptotic series.
inline constexpr double kK0AsymptoticCrossover = 30.0;

inline constexpr int kMaxBesselOrder = 64;
inline constexpr double kMaxBesselArgument = 1e6;

/// J_nu(x) for integer 0 <= nu <= 64 and 0 <= x <= 1e6.
double bessel_j(int nu, double x);
double bessel_j0(double x);
double bessel_j1(double x);

/// Y_0(x) for 0 < x <= 1e6.
double bessel_y0(double x);

/// K_0(x) for 0 < x <= 1e6; underflows to 0 beyond ~700.
double bessel_k0(double x);

/// Standard normal CDF, absolute error <= 1e-12.
double normal_cdf(double x);

/// Standard normal quantile (Acklam's rational approximation polished by
/// one Halley step); used for ideal-quantile checks.
double normal_quantile(double p);

}  // namespace ntdist::special
