#include "ntdist/randommodel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ntdist/errors.hpp"
#include "ntdist/io.hpp"
#include "ntdist/parallel.hpp"
#include "ntdist/rng.hpp"

namespace ntdist::randommodel {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kMaxSieve = 1'000'000'000;

}  // namespace

std::vector<std::uint64_t> squarefree_sieve(std::uint64_t M) {
  if (M < 1) throw DomainError("squarefree_sieve needs M >= 1");
  if (M > kMaxSieve) throw CapacityError("squarefree_sieve limited to M <= 1e9");
  std::vector<bool> bad(M + 1, false);
  for (std::uint64_t p = 2; p * p <= M; ++p) {
    for (std::uint64_t k = p * p; k <= M; k += p * p) bad[k] = true;
  }
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = 1; n <= M; ++n) {
    if (!bad[n]) out.push_back(n);
  }
  return out;
}

void ModelConfig::validate() const {
  if (M < 1) throw DomainError("model needs M >= 1");
  if (trials < 1) throw DomainError("model needs trials >= 1");
  if (!(L >= 2.0) || !std::isfinite(L)) throw DomainError("model needs L >= 2");
  if (max_moment < 1 || max_moment > 20) throw DomainError("max_moment must lie in 1..20");
}

RandomModel::RandomModel(const arith::DivisorTable& table, const ModelConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  if (cfg_.M > table.limit()) throw CapacityError("divisor table shorter than M");
  q_ = squarefree_sieve(cfg_.M);
  offset_.reserve(q_.size() + 1);
  const double lead = -2.0 / (kPi * std::numbers::sqrt2);
  for (std::uint64_t q : q_) {
    offset_.push_back(weight_.size());
    const double sq = std::sqrt(static_cast<double>(q));
    for (std::uint64_t f = 1; q * f * f <= cfg_.M; ++f) {
      const double fd = static_cast<double>(f);
      const double c = lead * table.d(q * f * f) * std::pow(static_cast<double>(q), -0.75) * std::pow(fd, -1.5) *
                       std::sin(2.0 * kPi * fd * sq / cfg_.L);
      weight_.push_back(std::polar(c, 2.0 * kPi * (fd * sq / cfg_.L - 0.125)));
    }
  }
  offset_.push_back(weight_.size());

  std::vector<double> terms(cfg_.M);
  for (std::uint64_t n = 1; n <= cfg_.M; ++n) {
    const double d = table.d(n);
    const double s = std::sin(2.0 * kPi * std::sqrt(static_cast<double>(n)) / cfg_.L);
    terms[n - 1] = d * d * std::pow(static_cast<double>(n), -1.5) * s * s;
  }
  sigma_ = std::sqrt(pairwise_sum(terms) / (kPi * kPi));
  if (!(sigma_ > 0.0)) throw DomainError("sigma_M vanishes for this (M, L)");
}

double RandomModel::theta(std::size_t trial, std::uint64_t q) const {
  return Philox4x32(cfg_.seed).uniform(trial, q);
}

double RandomModel::im_y(std::size_t i, double th) const {
  const std::complex<double> z = std::polar(1.0, 2.0 * kPi * th);
  std::complex<double> zf = z;
  double acc = 0.0;
  for (std::size_t k = offset_[i]; k < offset_[i + 1]; ++k) {
    acc += (weight_[k] * zf).imag();
    zf *= z;
  }
  return acc;
}

double RandomModel::sample_model_sum(std::size_t trial,
                                     const std::function<double(std::uint64_t)>& theta_override) const {
  std::vector<double> parts(q_.size());
  for (std::size_t i = 0; i < q_.size(); ++i) {
    const double th = theta_override ? theta_override(q_[i]) : theta(trial, q_[i]);
    parts[i] = im_y(i, th);
  }
  return pairwise_sum(parts) / sigma_;
}

double RandomModel::second_moment(std::size_t i) const {
  double s = 0.0;
  for (std::size_t k = offset_[i]; k < offset_[i + 1]; ++k) s += std::norm(weight_[k]);
  return 0.5 * s;
}

MomentReport model_moments_mc(const arith::DivisorTable& table, const ModelConfig& cfg) {
  const RandomModel model(table, cfg);
  MomentReport r;
  r.sigma = model.sigma();
  r.trial_sums.resize(cfg.trials);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(cfg.trials); ++t) {
    r.trial_sums[t] = model.sample_model_sum(static_cast<std::size_t>(t));
  }
  const double n = static_cast<double>(cfg.trials);
  r.standard_errors_available = cfg.trials >= 2;
  std::vector<double> power(r.trial_sums), sq(cfg.trials);
  for (int m = 1; m <= cfg.max_moment; ++m) {
    if (m > 1) {
      for (std::size_t i = 0; i < power.size(); ++i) power[i] *= r.trial_sums[i];
    }
    const double mean = pairwise_sum(power) / n;
    r.estimates.push_back(mean);
    r.gaussian_targets.push_back(gaussian_moment(m));
    if (r.standard_errors_available) {
      for (std::size_t i = 0; i < power.size(); ++i) sq[i] = (power[i] - mean) * (power[i] - mean);
      r.standard_errors.push_back(std::sqrt(pairwise_sum(sq) / (n - 1.0) / n));
    } else {
      r.standard_errors.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return r;
}

double gaussian_moment(int m) {
  if (m < 0 || m > 20) throw DomainError("gaussian_moment needs 0 <= m <= 20");
  if (m % 2) return 0.0;
  double v = 1.0;
  for (int k = m - 1; k > 1; k -= 2) v *= k;
  return v;
}

std::string to_csv(const MomentReport& r) {
  std::ostringstream out;
  out << "trial,sum\n";
  for (std::size_t i = 0; i < r.trial_sums.size(); ++i) out << i << ',' << io::format_double(r.trial_sums[i]) << '\n';
  return out.str();
}

}  // namespace ntdist::randommodel
