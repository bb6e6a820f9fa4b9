#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace e3lab {

enum class LogBase { Two, E };

inline double log_in(LogBase base, double x) {
  return base == LogBase::Two ? std::log2(x) : std::log(x);
}

inline std::string to_string(LogBase base) { return base == LogBase::Two ? "2" : "e"; }

inline LogBase log_base_from_string(const std::string& s) {
  if (s == "2") return LogBase::Two;
  if (s == "e") return LogBase::E;
  throw std::invalid_argument("log base must be '2' or 'e', got '" + s + "'");
}

// Ceiling that ignores floating-point noise just above an integer, so that
// e.g. 2 / 0.1^2 = 199.99999999999997 and 200.00000000000003 both map to 200.
inline std::int64_t ceil_int(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(x));
}

inline int ceil_log2(std::int64_t n) {
  int bits = 0;
  while ((std::int64_t{1} << bits) < n) ++bits;
  return bits;
}

}  // namespace e3lab
