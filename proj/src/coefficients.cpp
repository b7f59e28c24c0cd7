#include "ntdist/coefficients.hpp"

#include "ntdist/errors.hpp"

namespace ntdist {

const char* mode_name(Mode m) { return m == Mode::divisor ? "divisor" : "hecke"; }

Mode parse_mode(const std::string& s) {
  if (s == "divisor") return Mode::divisor;
  if (s == "hecke") return Mode::hecke;
  throw DomainError("mode must be 'divisor' or 'hecke', got '" + s + "'");
}

}  // namespace ntdist
