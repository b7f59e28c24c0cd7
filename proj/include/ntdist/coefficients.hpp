#pragma once

#include <cstdint>
#include <string>

#include "ntdist/arith.hpp"

namespace ntdist {

enum class Mode { divisor, hecke };

const char* mode_name(Mode m);
Mode parse_mode(const std::string& s);

/// Read-only view of the coefficient sequence tau(n): d(n) or rho_f(n).
class Coefficients {
 public:
  explicit Coefficients(const arith::DivisorTable& t) : mode_(Mode::divisor), divisor_(&t) {}
  explicit Coefficients(const arith::HeckeTable& t) : mode_(Mode::hecke), hecke_(&t) {}

  Mode mode() const noexcept { return mode_; }
  std::uint64_t limit() const noexcept { return divisor_ ? divisor_->limit() : hecke_->limit(); }
  double operator()(std::uint64_t n) const {
    return divisor_ ? static_cast<double>(divisor_->d(n)) : hecke_->rho(n);
  }
  const arith::DivisorTable* divisor() const noexcept { return divisor_; }
  const arith::HeckeTable* hecke() const noexcept { return hecke_; }

 private:
  Mode mode_;
  const arith::DivisorTable* divisor_ = nullptr;
  const arith::HeckeTable* hecke_ = nullptr;
};

}  // namespace ntdist
