#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ntdist/arith.hpp"
#include "ntdist/errors.hpp"
#include "ntdist/parallel.hpp"

namespace ntdist::arith {

namespace {

// Kronecker substitution with 64-bit-aligned digits. Each signed coefficient
// c_i is stored as c_i + 2^{b-1} in a b = 64*words bit slot, so packing and
// unpacking never need borrows between slots.
class KroneckerCodec {
 public:
  explicit KroneckerCodec(std::size_t words) : words_(words) {}

  mpz_class pack(const std::vector<mpz_class>& coeffs) const {
    const std::size_t n = coeffs.size();
    std::vector<std::uint64_t> buf(n * words_, 0);
    mpz_class digit;
    for (std::size_t i = 0; i < n; ++i) {
      digit = coeffs[i] + half_;
      std::size_t count = 0;
      mpz_export(&buf[i * words_], &count, -1, sizeof(std::uint64_t), 0, 0, digit.get_mpz_t());
    }
    mpz_class packed;
    mpz_import(packed.get_mpz_t(), buf.size(), -1, sizeof(std::uint64_t), 0, 0, buf.data());
    return packed - offset(n);
  }

  std::vector<mpz_class> unpack(const mpz_class& value, std::size_t n) const {
    const std::size_t total = 2 * n + 1;
    mpz_class shifted = value + offset(total);
    if (sgn(shifted) < 0) throw DomainError("Kronecker unpack: digit overflow");
    std::vector<std::uint64_t> buf(total * words_ + 1, 0);
    std::size_t count = 0;
    mpz_export(buf.data(), &count, -1, sizeof(std::uint64_t), 0, 0, shifted.get_mpz_t());
    if (count > total * words_) throw DomainError("Kronecker unpack: value too wide");
    std::vector<mpz_class> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      mpz_import(out[i].get_mpz_t(), words_, -1, sizeof(std::uint64_t), 0, 0, &buf[i * words_]);
      out[i] -= half_;
    }
    return out;
  }

 private:
  mpz_class offset(std::size_t n) const {
    std::vector<std::uint64_t> buf(n * words_, 0);
    for (std::size_t i = 0; i < n; ++i) buf[i * words_ + words_ - 1] = std::uint64_t{1} << 63;
    mpz_class o;
    mpz_import(o.get_mpz_t(), buf.size(), -1, sizeof(std::uint64_t), 0, 0, buf.data());
    return o;
  }

  std::size_t words_;
  mpz_class half_ = [this] {
    mpz_class h;
    mpz_setbit(h.get_mpz_t(), 64 * words_ - 1);
    return h;
  }();
};

std::size_t bit_length(std::uint64_t v) {
  std::size_t b = 0;
  while (v) {
    ++b;
    v >>= 1;
  }
  return b;
}

// Square a truncated power series, keeping the first n coefficients.
std::vector<mpz_class> square_series(const std::vector<mpz_class>& a) {
  const std::size_t n = a.size();
  std::size_t max_bits = 0;
  for (const auto& c : a) max_bits = std::max(max_bits, mpz_sizeinbase(c.get_mpz_t(), 2));
  // |coefficient of the square| <= n * max^2 < 2^{b-1}.
  const std::size_t need = 2 * max_bits + bit_length(n) + 2;
  const KroneckerCodec codec((need + 63) / 64);
  const mpz_class packed = codec.pack(a);
  mpz_class sq;
  mpz_mul(sq.get_mpz_t(), packed.get_mpz_t(), packed.get_mpz_t());
  return codec.unpack(sq, n);
}

}  // namespace

std::vector<mpz_class> ramanujan_tau(std::uint64_t limit) {
  // prod (1 - q^n)^3 = sum_j (-1)^j (2j+1) q^{j(j+1)/2}
  std::vector<mpz_class> series(limit, 0);
  for (std::uint64_t j = 0;; ++j) {
    const std::uint64_t e = j * (j + 1) / 2;
    if (e >= limit) break;
    series[e] = (j % 2 == 0 ? 1 : -1) * static_cast<long>(2 * j + 1);
  }
  for (int i = 0; i < 3; ++i) series = square_series(series);
  // tau(n) is the coefficient of q^{n-1} in prod (1 - q^n)^24.
  std::vector<mpz_class> tau(limit + 1, 0);
  for (std::uint64_t n = 1; n <= limit; ++n) tau[n] = std::move(series[n - 1]);
  return tau;
}

HeckeTable HeckeTable::build(int weight, std::uint64_t limit, std::uint64_t ceiling) {
  if (weight != 12) {
    throw UnsupportedError("only the weight-12 level-1 form is implemented (got weight " +
                           std::to_string(weight) + ")");
  }
  if (limit == 0 || limit > ceiling) {
    throw CapacityError("Hecke table limit " + std::to_string(limit) + " outside [1, " +
                        std::to_string(ceiling) + "]");
  }
  HeckeTable t;
  t.weight_ = weight;
  t.exact_ = ramanujan_tau(limit);
  t.normalize();
  return t;
}

HeckeTable HeckeTable::from_exact(int weight, std::vector<mpz_class> exact) {
  if (weight != 12) throw UnsupportedError("only weight 12 is implemented");
  if (exact.size() < 2 || exact[1] != 1) throw DomainError("Hecke table must have a(1) = 1");
  HeckeTable t;
  t.weight_ = weight;
  t.exact_ = std::move(exact);
  t.normalize();
  return t;
}

void HeckeTable::normalize() {
  const std::uint64_t n_max = limit();
  const double half_weight = 0.5 * (weight_ - 1);
  normalized_.assign(n_max + 1, 0.0);
  prefix_.assign(n_max + 1, 0.0);
  CompensatedSum acc;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    normalized_[n] = exact_[n].get_d() / std::pow(static_cast<double>(n), half_weight);
    acc.add(normalized_[n]);
    prefix_[n] = acc.value();
  }
}

}  // namespace ntdist::arith
