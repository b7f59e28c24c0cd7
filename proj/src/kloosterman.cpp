#include "ntdist/kloosterman.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ntdist/errors.hpp"
#include "ntdist/parallel.hpp"

namespace ntdist::kloosterman {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 b, u64 e, u64 m) {
  u64 r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

std::int64_t mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

// Inverse of a modulo m by the extended Euclidean algorithm; gcd(a, m) = 1.
std::int64_t inverse(std::int64_t a, std::int64_t m) {
  std::int64_t t = 0, nt = 1, r = m, nr = mod(a, m);
  while (nr != 0) {
    const std::int64_t q = r / nr;
    std::int64_t tmp = t - q * nt;
    t = nt;
    nt = tmp;
    tmp = r - q * nr;
    r = nr;
    nr = tmp;
  }
  return mod(t, m);
}

void check_modulus(std::int64_t c) {
  if (c <= 0) throw DomainError("Kloosterman modulus must be >= 1, got " + std::to_string(c));
  if (c > kMaxModulus) throw CapacityError("Kloosterman modulus above 1e7 direct-summation budget");
}

void check_prime(std::int64_t p) {
  if (p < 2 || !is_prime(static_cast<u64>(p))) {
    throw DomainError("modulus " + std::to_string(p) + " is not prime");
  }
}

}  // namespace

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u}) {
    if (n % q == 0) return n == q;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<std::uint32_t> unit_inverses(std::uint32_t c) {
  std::vector<std::uint32_t> inv(c, 0);
  if (c == 1) {
    inv[0] = 0;
    return inv;
  }
  std::vector<std::uint32_t> units;
  units.reserve(c);
  for (std::uint32_t x = 1; x < c; ++x) {
    u64 a = x, b = c;
    while (b) {
      const u64 t = a % b;
      a = b;
      b = t;
    }
    if (a == 1) units.push_back(x);
  }
  // prefix[i] = units[0] * ... * units[i]
  std::vector<u64> prefix(units.size());
  u64 acc = 1;
  for (std::size_t i = 0; i < units.size(); ++i) {
    acc = acc * units[i] % c;
    prefix[i] = acc;
  }
  u64 running = static_cast<u64>(inverse(static_cast<std::int64_t>(acc), c));
  for (std::size_t i = units.size(); i-- > 0;) {
    const u64 before = i == 0 ? 1 : prefix[i - 1];
    inv[units[i]] = static_cast<std::uint32_t>(running * before % c);
    running = running * units[i] % c;
  }
  return inv;
}

double kloosterman_sum(std::int64_t a, std::int64_t b, std::int64_t c) {
  check_modulus(c);
  if (c == 1) return 1.0;  // the single unit x = 0, e(0) = 1
  const auto inv = unit_inverses(static_cast<std::uint32_t>(c));
  const u64 am = static_cast<u64>(mod(a, c));
  const u64 bm = static_cast<u64>(mod(b, c));
  const double step = 2.0 * std::numbers::pi / static_cast<double>(c);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(c));
  for (std::int64_t x = 1; x < c; ++x) {
    if (inv[x] == 0) continue;
    const u64 k = (static_cast<u64>(x) * am + static_cast<u64>(inv[x]) * bm) % static_cast<u64>(c);
    terms.push_back(std::cos(step * static_cast<double>(k)));
  }
  return pairwise_sum(terms);
}

double kl2(std::int64_t a, std::int64_t b, std::int64_t p) {
  check_prime(p);
  return kloosterman_sum(a, b, p) / std::sqrt(static_cast<double>(p));
}

KloostermanTable::KloostermanTable(std::uint32_t p) : p_(p) {
  check_prime(p);
  check_modulus(p);
  inv_sqrt_p_ = 1.0 / std::sqrt(static_cast<double>(p));
  const auto inv = unit_inverses(p);
  std::vector<double> cosines(p);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(p);
  for (std::uint32_t k = 0; k < p; ++k) cosines[k] = std::cos(step * k);
  values_.assign(p, 0.0);
#pragma omp parallel
  {
    std::vector<double> terms(p - 1);
#pragma omp for schedule(static)
    for (std::int64_t m = 0; m < static_cast<std::int64_t>(p); ++m) {
      for (std::uint32_t x = 1; x < p; ++x) {
        const u64 k = (x + static_cast<u64>(inv[x]) * static_cast<u64>(m)) % p;
        terms[x - 1] = cosines[k];
      }
      values_[m] = pairwise_sum(terms);
    }
  }
}

double KloostermanTable::sum(std::int64_t a, std::int64_t b) const {
  const std::int64_t p = p_;
  const std::int64_t am = mod(a, p), bm = mod(b, p);
  if (am == 0 && bm == 0) return static_cast<double>(p - 1);
  if (am == 0) return values_[0];  // Ramanujan sum c_p(b) = -1
  return values_[static_cast<std::size_t>(mulmod(am, bm, p))];
}

double KloostermanTable::kl2(std::int64_t a, std::int64_t b) const {
  return sum(a, b) * inv_sqrt_p_;
}

double orthogonality_average(const KloostermanTable& table, std::int64_t m, std::int64_t n) {
  const std::int64_t p = table.p();
  std::vector<double> terms(static_cast<std::size_t>(p - 1));
  for (std::int64_t a = 1; a < p; ++a) terms[a - 1] = table.kl2(a, m) * table.kl2(a, n);
  return pairwise_sum(terms) / static_cast<double>(p - 1);
}

double orthogonality_average(std::int64_t p, std::int64_t m, std::int64_t n) {
  check_prime(p);
  return orthogonality_average(KloostermanTable(static_cast<std::uint32_t>(p)), m, n);
}

double orthogonality_closed_form(std::int64_t p, std::int64_t m, std::int64_t n) {
  check_prime(p);
  if (mod(m, p) == 0 || mod(n, p) == 0) throw DomainError("closed form needs p not dividing mn");
  const double pd = static_cast<double>(p);
  if (mod(m - n, p) == 0) return 1.0 - 1.0 / (pd * (pd - 1.0));
  return -(pd + 1.0) / (pd * (pd - 1.0));
}

}  // namespace ntdist::kloosterman
