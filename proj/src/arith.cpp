#include "ntdist/arith.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ntdist/errors.hpp"
#include "ntdist/parallel.hpp"

namespace ntdist::arith {

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::uint32_t count_divisors(std::uint64_t n) {
  if (n == 0) return 0;
  std::uint32_t count = 0;
  for (std::uint64_t i = 1; i * i <= n; ++i) {
    if (n % i == 0) count += (i * i == n) ? 1 : 2;
  }
  return count;
}

DivisorTable DivisorTable::build(std::uint64_t limit, std::uint64_t ceiling) {
  if (limit == 0 || limit > ceiling) {
    throw CapacityError("divisor table limit " + std::to_string(limit) +
                        " outside [1, " + std::to_string(ceiling) + "]");
  }
  DivisorTable t;
  t.values_.assign(limit + 1, 0);
  t.prefix_.assign(limit + 1, 0);

  // Linear sieve: every composite is reached once through its smallest prime.
  // exponent[n] is the multiplicity of the smallest prime factor of n.
  std::vector<std::uint8_t> exponent(limit + 1, 0);
  std::vector<std::uint32_t> primes;
  primes.reserve(limit < 100 ? 32 : static_cast<std::size_t>(1.2 * limit / std::log(limit)));
  auto& d = t.values_;
  d[1] = 1;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (d[i] == 0) {
      d[i] = 2;
      exponent[i] = 1;
      primes.push_back(static_cast<std::uint32_t>(i));
    }
    for (const std::uint32_t p : primes) {
      const std::uint64_t ip = i * p;
      if (ip > limit) break;
      if (i % p == 0) {
        const unsigned e = exponent[i];
        exponent[ip] = static_cast<std::uint8_t>(e + 1);
        d[ip] = static_cast<std::uint16_t>(d[i] / (e + 1) * (e + 2));
        break;
      }
      exponent[ip] = 1;
      d[ip] = static_cast<std::uint16_t>(d[i] * 2);
    }
  }
  for (std::uint64_t n = 1; n <= limit; ++n) t.prefix_[n] = t.prefix_[n - 1] + d[n];
  return t;
}

DivisorTable DivisorTable::from_arrays(std::vector<std::uint16_t> values,
                                       std::vector<std::uint64_t> prefix) {
  if (values.size() < 2 || values.size() != prefix.size() || values[1] != 1 || prefix[0] != 0) {
    throw DomainError("malformed divisor table arrays");
  }
  for (std::size_t n = 1; n < values.size(); ++n) {
    if (prefix[n] != prefix[n - 1] + values[n]) throw DomainError("divisor prefix mismatch");
  }
  DivisorTable t;
  t.values_ = std::move(values);
  t.prefix_ = std::move(prefix);
  return t;
}

std::uint64_t divisor_summatory(std::uint64_t n) {
  if (n == 0) return 0;
  const std::uint64_t r = isqrt(n);
  std::uint64_t s = 0;
  for (std::uint64_t i = 1; i <= r; ++i) s += n / i;
  return 2 * s - r * r;
}

std::uint64_t divisor_summatory(double x) {
  if (!(x >= 1.0)) return 0;
  return divisor_summatory(static_cast<std::uint64_t>(std::floor(x)));
}

SummatoryRemainder delta_remainder(double x) {
  if (!(x >= 1.0)) throw DomainError("delta_remainder requires x >= 1");
  SummatoryRemainder r;
  r.x = x;
  r.exact_sum = divisor_summatory(x);
  r.main_term = x * (std::log(x) + 2.0 * kEulerGamma - 1.0);
  r.remainder = static_cast<double>(r.exact_sum) - r.main_term;
  return r;
}

std::uint64_t d2_summatory(const DivisorTable& table, double t) {
  if (!(t >= 1.0)) return 0;
  const auto n = static_cast<std::uint64_t>(std::floor(t));
  if (n > table.limit()) {
    throw CapacityError("d2_summatory: t exceeds divisor table limit " +
                        std::to_string(table.limit()));
  }
  std::uint64_t s = 0;
  const auto v = table.values();
  for (std::uint64_t m = 1; m <= n; ++m) s += std::uint64_t{v[m]} * v[m];
  return s;
}

namespace {

// Least squares by modified Gram-Schmidt on a column-scaled design.
std::vector<double> least_squares(std::vector<std::vector<double>> cols, std::vector<double> y) {
  const std::size_t m = y.size();
  const std::size_t k = cols.size();
  std::vector<double> scale(k);
  for (std::size_t j = 0; j < k; ++j) {
    double nrm = 0.0;
    for (double v : cols[j]) nrm += v * v;
    scale[j] = std::sqrt(nrm);
    if (!(scale[j] > 0.0)) throw FitError("zero column in design");
    for (double& v : cols[j]) v /= scale[j];
  }
  std::vector<std::vector<double>> r(k, std::vector<double>(k, 0.0));
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      double dot = 0.0;
      for (std::size_t t = 0; t < m; ++t) dot += cols[i][t] * cols[j][t];
      r[i][j] = dot;
      for (std::size_t t = 0; t < m; ++t) cols[j][t] -= dot * cols[i][t];
    }
    double nrm = 0.0;
    for (double v : cols[j]) nrm += v * v;
    nrm = std::sqrt(nrm);
    if (nrm < 1e-10) throw FitError("rank-deficient design");
    r[j][j] = nrm;
    for (double& v : cols[j]) v /= nrm;
  }
  std::vector<double> qty(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t t = 0; t < m; ++t) qty[j] += cols[j][t] * y[t];
  }
  std::vector<double> x(k, 0.0);
  for (std::size_t jj = k; jj-- > 0;) {
    double s = qty[jj];
    for (std::size_t i = jj + 1; i < k; ++i) s -= r[jj][i] * x[i];
    x[jj] = s / r[jj][jj];
  }
  for (std::size_t j = 0; j < k; ++j) x[j] /= scale[j];
  return x;
}

}  // namespace

PolyLogFit fit_d2_polylog(const DivisorTable& table, std::span<const double> t_grid) {
  std::vector<double> grid(t_grid.begin(), t_grid.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.size() < 4) throw FitError("fit_c3 needs at least 4 distinct grid points");
  if (!(grid.front() >= 2.0)) throw FitError("fit_c3 grid points must be >= 2");
  if (grid.back() / grid.front() < 100.0) throw FitError("fit_c3 grid must span two decades");
  if (grid.back() > static_cast<double>(table.limit())) {
    throw CapacityError("fit_c3 grid exceeds divisor table limit");
  }

  // One pass over the sieve accumulates every grid point.
  std::vector<double> sums(grid.size());
  {
    const auto v = table.values();
    std::uint64_t acc = 0;
    std::uint64_t m = 1;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto upto = static_cast<std::uint64_t>(std::floor(grid[g]));
      for (; m <= upto; ++m) acc += std::uint64_t{v[m]} * v[m];
      sums[g] = static_cast<double>(acc);
    }
  }
  // Fit sum/t = a3 L^3 + a2 L^2 + a1 L + a0 in a centered log variable.
  double center = 0.0;
  for (double t : grid) center += std::log(t);
  center /= static_cast<double>(grid.size());
  std::vector<std::vector<double>> cols(4, std::vector<double>(grid.size()));
  std::vector<double> y(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double u = std::log(grid[g]) - center;
    cols[0][g] = u * u * u;
    cols[1][g] = u * u;
    cols[2][g] = u;
    cols[3][g] = 1.0;
    y[g] = sums[g] / grid[g];
  }
  const auto b = least_squares(std::move(cols), std::move(y));
  // Undo the shift L = u + c.
  const double c = center;
  PolyLogFit fit;
  fit.a3 = b[0];
  fit.a2 = b[1] - 3.0 * b[0] * c;
  fit.a1 = b[2] - 2.0 * b[1] * c + 3.0 * b[0] * c * c;
  fit.a0 = b[3] - b[2] * c + b[1] * c * c - b[0] * c * c * c;
  return fit;
}

double fit_c3(const DivisorTable& table, std::span<const double> t_grid) {
  return fit_d2_polylog(table, t_grid).a3;
}

double hecke_summatory(const HeckeTable& table, double x) {
  if (!(x >= 1.0)) return 0.0;
  const auto n = static_cast<std::uint64_t>(std::floor(x));
  if (n > table.limit()) {
    throw CapacityError("hecke_summatory: x exceeds Hecke table limit " +
                        std::to_string(table.limit()));
  }
  return table.prefix(n);
}

CfEstimate estimate_cf(const HeckeTable& table, double x) {
  if (!(x >= 1.0)) throw DomainError("estimate_cf requires X >= 1");
  const auto n = static_cast<std::uint64_t>(std::floor(x));
  if (n > table.limit()) throw CapacityError("estimate_cf: X exceeds Hecke table limit");
  CompensatedSum s;
  for (std::uint64_t m = 1; m <= n; ++m) s.add(table.rho(m) * table.rho(m));
  CfEstimate est;
  est.x = x;
  est.value = s.value() / x;
  est.precision_warning = x < 1e3;
  return est;
}

}  // namespace ntdist::arith
