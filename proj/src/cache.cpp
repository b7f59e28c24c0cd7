#include "ntdist/cache.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <vector>

#include "ntdist/errors.hpp"

namespace ntdist::cache {

namespace {

constexpr std::array<char, 8> kMagic = {'N', 'T', 'C', 'A', 'C', 'H', 'E', '\0'};

struct Header {
  std::uint32_t k = 0;
  std::uint64_t n = 0;
};

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in, const std::filesystem::path& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw Error("truncated cache file " + path.string());
  return v;
}

std::ofstream open_out(const std::filesystem::path& path, std::uint32_t k, std::uint64_t n) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write cache file " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put(out, kVersion);
  put(out, k);
  put(out, n);
  return out;
}

Header read_header(std::istream& in, const std::filesystem::path& path) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw Error("not a table cache: " + path.string());
  const auto version = get<std::uint32_t>(in, path);
  if (version != kVersion) throw Error("unsupported cache version " + std::to_string(version));
  Header h;
  h.k = get<std::uint32_t>(in, path);
  h.n = get<std::uint64_t>(in, path);
  return h;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open cache file " + path.string());
  return in;
}

bool cache_covers(const std::filesystem::path& path, std::uint32_t k, std::uint64_t limit) {
  if (path.empty() || !std::filesystem::exists(path)) return false;
  try {
    auto in = open_in(path);
    const auto h = read_header(in, path);
    return h.k == k && h.n >= limit;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

void save(const std::filesystem::path& path, const arith::DivisorTable& t) {
  auto out = open_out(path, 0, t.limit());
  const auto v = t.values();
  const auto p = t.prefixes();
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size_bytes()));
  out.write(reinterpret_cast<const char*>(p.data()), static_cast<std::streamsize>(p.size_bytes()));
  if (!out) throw Error("write failed for " + path.string());
}

void save(const std::filesystem::path& path, const arith::HeckeTable& t) {
  auto out = open_out(path, static_cast<std::uint32_t>(t.weight()), t.limit());
  std::vector<unsigned char> buf;
  for (const auto& a : t.exact_values()) {
    const int sign = mpz_sgn(a.get_mpz_t());
    const std::size_t bytes = sign == 0 ? 0 : (mpz_sizeinbase(a.get_mpz_t(), 2) + 7) / 8;
    buf.resize(bytes);
    std::size_t written = 0;
    if (bytes) mpz_export(buf.data(), &written, 1, 1, 1, 0, a.get_mpz_t());
    put(out, static_cast<std::int32_t>(sign < 0 ? -static_cast<std::int32_t>(written) : static_cast<std::int32_t>(written)));
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(written));
  }
  if (!out) throw Error("write failed for " + path.string());
}

arith::DivisorTable load_divisor(const std::filesystem::path& path) {
  auto in = open_in(path);
  const auto h = read_header(in, path);
  if (h.k != 0) throw Error("cache holds cusp-form coefficients, not d(n)");
  std::vector<std::uint16_t> v(h.n + 1);
  std::vector<std::uint64_t> p(h.n + 1);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(std::uint16_t)));
  in.read(reinterpret_cast<char*>(p.data()), static_cast<std::streamsize>(p.size() * sizeof(std::uint64_t)));
  if (!in) throw Error("truncated cache file " + path.string());
  return arith::DivisorTable::from_arrays(std::move(v), std::move(p));
}

arith::HeckeTable load_hecke(const std::filesystem::path& path) {
  auto in = open_in(path);
  const auto h = read_header(in, path);
  if (h.k == 0) throw Error("cache holds d(n), not cusp-form coefficients");
  std::vector<mpz_class> exact(h.n + 1);
  std::vector<unsigned char> buf;
  for (auto& a : exact) {
    const auto len = get<std::int32_t>(in, path);
    const std::size_t bytes = static_cast<std::size_t>(len < 0 ? -static_cast<std::int64_t>(len) : len);
    buf.resize(bytes);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw Error("truncated cache file " + path.string());
    if (bytes) mpz_import(a.get_mpz_t(), bytes, 1, 1, 1, 0, buf.data());
    if (len < 0) a = -a;
  }
  return arith::HeckeTable::from_exact(static_cast<int>(h.k), std::move(exact));
}

arith::DivisorTable divisor_table(const std::filesystem::path& path, std::uint64_t limit, std::uint64_t ceiling) {
  if (cache_covers(path, 0, limit)) {
    auto t = load_divisor(path);
    if (t.limit() == limit) return t;
    std::vector<std::uint16_t> v(t.values().begin(), t.values().begin() + limit + 1);
    std::vector<std::uint64_t> p(t.prefixes().begin(), t.prefixes().begin() + limit + 1);
    return arith::DivisorTable::from_arrays(std::move(v), std::move(p));
  }
  auto t = arith::DivisorTable::build(limit, ceiling);
  if (!path.empty()) save(path, t);
  return t;
}

arith::HeckeTable hecke_table(const std::filesystem::path& path, std::uint64_t limit, std::uint64_t ceiling) {
  if (cache_covers(path, 12, limit)) {
    auto t = load_hecke(path);
    if (t.limit() == limit) return t;
    std::vector<mpz_class> e(t.exact_values().begin(), t.exact_values().begin() + limit + 1);
    return arith::HeckeTable::from_exact(12, std::move(e));
  }
  auto t = arith::HeckeTable::build(12, limit, ceiling);
  if (!path.empty()) save(path, t);
  return t;
}

}  // namespace ntdist::cache
