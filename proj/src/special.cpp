#include "ntdist/special.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ntdist/errors.hpp"

namespace ntdist::special {

namespace {

using ld = long double;
constexpr ld kPiL = 3.141592653589793238462643383279502884L;
constexpr ld kGammaL = 0.577215664901532860606512090082402431L;

void check_argument(double x, bool allow_zero) {
  if (std::isnan(x) || x > kMaxBesselArgument || x < 0.0 || (!allow_zero && x == 0.0)) {
    throw DomainError("Bessel argument out of range: " + std::to_string(x));
  }
}

// sum_k (-1)^k (x/2)^{2k+nu} / (k! (k+nu)!)
ld j_series(int nu, ld x) {
  const ld h = x / 2;
  const ld q = h * h;
  ld term = 1;
  for (int i = 1; i <= nu; ++i) term *= h / i;
  ld sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<ld>(k) * (k + nu));
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum) && static_cast<ld>(k) * k > q) break;
  }
  return sum;
}

// (2/pi) sum_{k>=1} (-1)^{k+1} H_k (x^2/4)^k / (k!)^2
ld y0_series_tail(ld x) {
  const ld q = x * x / 4;
  ld term = 1;
  ld harmonic = 0;
  ld sum = 0;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<ld>(k) * k);
    harmonic += 1.0L / k;
    const ld t = -term * harmonic;
    sum += t;
    if (std::fabs(t) < 1e-22L * std::fabs(sum) && static_cast<ld>(k) * k > q) break;
  }
  return 2 * sum / kPiL;
}

struct Hankel {
  double p, q;
};

// P and Q of the Hankel expansion, summed until terms stop shrinking.
Hankel hankel_pq(int nu, double x) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0, q = 0.0;
  double a = 1.0;  // a_k(nu) / x^k
  double prev = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    a *= (mu - odd * odd) / (8.0 * k * x);
    const double mag = std::fabs(a);
    if (mag > prev || mag < 1e-17) break;
    prev = mag;
    // terms alternate in pairs: +a0, -a2, +a4 ... for P; +a1, -a3 ... for Q
    const int r = k % 4;
    if (r == 1) q += a;
    else if (r == 2) p -= a;
    else if (r == 3) q -= a;
    else p += a;
  }
  return {p, q};
}

// cos(x - phase) and sin(x - phase) without forming x - phase in double.
void shifted_trig(double x, double phase, double& c, double& s) {
  const double cx = std::cos(x), sx = std::sin(x);
  const double cp = std::cos(phase), sp = std::sin(phase);
  c = cx * cp + sx * sp;
  s = sx * cp - cx * sp;
}

double j_asymptotic(int nu, double x) {
  const auto [p, q] = hankel_pq(nu, x);
  double c, s;
  shifted_trig(x, (0.5 * nu + 0.25) * std::numbers::pi, c, s);
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * c - q * s);
}

double y_asymptotic(int nu, double x) {
  const auto [p, q] = hankel_pq(nu, x);
  double c, s;
  shifted_trig(x, (0.5 * nu + 0.25) * std::numbers::pi, c, s);
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * s + q * c);
}

// Miller's backward recurrence normalized by J_0 + 2 sum J_{2k} = 1.
double j_miller(int nu, double x) {
  int start = static_cast<int>(std::max<double>(nu, x)) + 40 +
              static_cast<int>(std::sqrt(40.0 * std::max<double>(nu, x)));
  if (start % 2) ++start;
  ld next = 0, cur = 1e-300L;
  ld norm = 0;
  ld result = 0;
  for (int n = start; n >= 1; --n) {
    const ld prev = (2.0L * n / x) * cur - next;  // J_{n-1}
    next = cur;
    cur = prev;
    if (n - 1 == nu) result = cur;
    if ((n - 1) % 2 == 0) norm += (n - 1 == 0) ? cur : 2 * cur;
    if (std::fabs(cur) > 1e300L) {
      next /= 1e300L;
      cur /= 1e300L;
      norm /= 1e300L;
      result /= 1e300L;
    }
  }
  return static_cast<double>(result / norm);
}

}  // namespace

double bessel_j0(double x) { return bessel_j(0, x); }
double bessel_j1(double x) { return bessel_j(1, x); }

double bessel_j(int nu, double x) {
  if (nu < 0 || nu > kMaxBesselOrder) {
    throw DomainError("Bessel order out of range: " + std::to_string(nu));
  }
  check_argument(x, true);
  if (x == 0.0) return nu == 0 ? 1.0 : 0.0;
  if (x <= kSeriesAsymptoticCrossover) return static_cast<double>(j_series(nu, x));
  if (nu <= 1) return j_asymptotic(nu, x);
  if (x >= nu) {
    double jm = j_asymptotic(0, x);
    double j = j_asymptotic(1, x);
    for (int n = 1; n < nu; ++n) {
      const double jn = (2.0 * n / x) * j - jm;
      jm = j;
      j = jn;
    }
    return j;
  }
  return j_miller(nu, x);
}

double bessel_y0(double x) {
  check_argument(x, false);
  if (x <= kSeriesAsymptoticCrossover) {
    const ld xl = x;
    const ld j0 = j_series(0, xl);
    return static_cast<double>(2 / kPiL * (std::log(xl / 2) + kGammaL) * j0 +
                               y0_series_tail(xl));
  }
  return y_asymptotic(0, x);
}

double bessel_k0(double x) {
  check_argument(x, false);
  if (x >= kK0AsymptoticCrossover) {
    // K_0(x) ~ sqrt(pi/2x) e^{-x} sum_k a_k / x^k with a_k = prod (2j-1)^2 / (k! 8^k)
    double sum = 1.0, term = 1.0, prev = 1.0;
    for (int k = 1; k < 100; ++k) {
      const double odd = 2.0 * k - 1.0;
      term *= -odd * odd / (8.0 * k * x);
      const double mag = std::fabs(term);
      if (mag > prev || mag < 1e-17) break;
      prev = mag;
      sum += term;
    }
    return std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) * sum;
  }
  // Trapezoid on the even, doubly-exponentially decaying integrand.
  constexpr double h = 0.1;
  double sum = 0.5 * std::exp(-x);
  for (int i = 1;; ++i) {
    const double arg = x * std::cosh(i * h);
    if (arg > 745.0) break;
    sum += std::exp(-arg);
  }
  return h * sum;
}

double normal_cdf(double x) {
  if (std::isnan(x)) return x;
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile requires 0 < p < 1");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double lo = 0.02425;
  double x;
  if (p < lo) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p > 1.0 - lo) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  // One Halley step on Phi(x) - p.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace ntdist::special
