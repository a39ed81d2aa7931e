#ifndef STRATVAR_RATIO_HPP
#define STRATVAR_RATIO_HPP

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "stratvar/error.hpp"

namespace stratvar {

/// Arbitrary-precision rational, always held in lowest terms with a positive
/// denominator.
using Ratio = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Ratio ratio(std::int64_t num, std::int64_t den = 1) {
  if (den == 0) throw Error(ErrorKind::InvalidArgument, "zero denominator");
  return Ratio(BigInt(num), BigInt(den));
}

inline BigInt numerator(const Ratio& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator(const Ratio& r) { return boost::multiprecision::denominator(r); }

/// Canonical "num/den" rendering. Integers keep the "/1".
inline std::string to_string(const Ratio& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

/// Nearest double. Converts through the multiprecision backend, which rounds
/// correctly rather than dividing two pre-rounded doubles.
inline double to_double(const Ratio& r) { return r.convert_to<double>(); }

/// Accepts "a/b" or "a" with optional sign on the numerator.
inline Ratio parse_ratio(std::string_view text) {
  auto digits_ok = [](std::string_view s, bool allow_sign) {
    if (allow_sign && !s.empty() && (s[0] == '-' || s[0] == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return true;
  };
  const auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!digits_ok(num, true) || !digits_ok(den, false))
    throw Error(ErrorKind::ParseError, "malformed rational '" + std::string(text) + "'");
  std::string n(num);
  if (!n.empty() && n[0] == '+') n.erase(0, 1);
  const BigInt d{std::string(den)};
  if (d == 0) throw Error(ErrorKind::ParseError, "zero denominator in '" + std::string(text) + "'");
  return Ratio(BigInt(n), d);
}

}  // namespace stratvar

#endif  // STRATVAR_RATIO_HPP
