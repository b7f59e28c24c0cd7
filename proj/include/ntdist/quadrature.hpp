#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

#include "ntdist/errors.hpp"

namespace ntdist::special {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  /// Caller-supplied oscillation length. When positive, [a, b] is first cut
  /// into panels no wider than half of it.
  double oscillation_length = 0.0;
  std::size_t max_subdivisions = 200000;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const {
    // Ties broken by position so the refinement order is deterministic.
    return error < o.error || (error == o.error && a > o.a);
  }
};

template <class F>
Panel gauss_kronrod(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kKronrodNodes[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    kronrod += kKronrodWeights[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
  }
  return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature over the panels
/// delimited by `breakpoints` (sorted, at least two entries). The worst panel
/// is bisected until the summed error estimate is below
/// max(abs_tol, rel_tol * |value|). Deterministic for identical inputs.
/// Throws AccuracyError carrying the best estimate if max_subdivisions is hit.
template <class F>
QuadratureResult adaptive_quad(F&& f, std::span<const double> breakpoints,
                               const QuadOptions& opt = {}) {
  if (breakpoints.size() < 2) throw DomainError("adaptive_quad needs an interval");
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > breakpoints[i - 1])) {
      throw DomainError("adaptive_quad breakpoints must be strictly increasing");
    }
  }
  if (!(opt.abs_tol > 0.0) && !(opt.rel_tol > 0.0)) throw DomainError("tolerance must be > 0");

  std::vector<double> cuts;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double lo = breakpoints[i];
    const double hi = breakpoints[i + 1];
    std::size_t pieces = 1;
    if (opt.oscillation_length > 0.0) {
      pieces = static_cast<std::size_t>(std::ceil((hi - lo) / (0.5 * opt.oscillation_length)));
      pieces = std::max<std::size_t>(pieces, 1);
    }
    for (std::size_t j = 0; j < pieces; ++j) {
      cuts.push_back(lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(pieces));
    }
  }
  cuts.push_back(breakpoints.back());

  std::priority_queue<detail::Panel> heap;
  QuadratureResult res;
  double total = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto p = detail::gauss_kronrod(f, cuts[i], cuts[i + 1]);
    res.evaluations += 15;
    total += p.value;
    error += p.error;
    heap.push(p);
  }
  std::size_t splits = 0;
  auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
  while (error > target()) {
    if (splits >= opt.max_subdivisions) {
      throw AccuracyError("adaptive_quad did not converge", total, error);
    }
    const detail::Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw AccuracyError("adaptive_quad reached machine resolution", total, error);
    }
    const auto left = detail::gauss_kronrod(f, worst.a, mid);
    const auto right = detail::gauss_kronrod(f, mid, worst.b);
    res.evaluations += 30;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++splits;
  }
  // Re-sum the final panels so the value does not carry update round-off.
  std::vector<detail::Panel> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(),
            [](const detail::Panel& x, const detail::Panel& y) { return x.a < y.a; });
  res.value = 0.0;
  res.error_estimate = 0.0;
  for (const auto& p : panels) {
    res.value += p.value;
    res.error_estimate += p.error;
  }
  return res;
}

template <class F>
QuadratureResult adaptive_quad(F&& f, double a, double b, double tol,
                               double oscillation_length = 0.0) {
  if (!(a < b)) throw DomainError("adaptive_quad requires a < b");
  if (!(tol > 0.0)) throw DomainError("adaptive_quad requires tol > 0");
  const std::array<double, 2> ends{a, b};
  QuadOptions opt;
  opt.abs_tol = tol;
  opt.oscillation_length = oscillation_length;
  return adaptive_quad(std::forward<F>(f), std::span<const double>(ends), opt);
}

}  // namespace ntdist::special
