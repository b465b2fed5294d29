#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "lrbisim/error.hpp"

namespace lrbisim {

/// Exact arbitrary-precision rational; all measure arithmetic uses it.
using Rational = boost::multiprecision::cpp_rational;

/// "p" or "p/q" with decimal digits and an optional leading '-'.
/// Decimal points, exponents and blanks are rejected.
inline Rational parse_rational(std::string_view text) {
  auto digits = [](std::string_view s) {
    return !s.empty() && s.find_first_not_of("0123456789") == std::string_view::npos;
  };
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && body.front() == '-') {
    negative = true;
    body.remove_prefix(1);
  }
  auto slash = body.find('/');
  std::string_view num = body.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : body.substr(slash + 1);
  if (!digits(num) || !digits(den))
    throw Error("malformed rational '" + std::string(text) + "'");
  boost::multiprecision::cpp_int n{std::string(num)}, d{std::string(den)};
  if (d == 0)
    throw Error("zero denominator in '" + std::string(text) + "'");
  Rational r(n, d);
  return negative ? Rational(-r) : r;
}

/// Canonical rendering: "p" for integers, "p/q" in lowest terms otherwise.
inline std::string to_string(const Rational& r) {
  auto num = boost::multiprecision::numerator(r);
  auto den = boost::multiprecision::denominator(r);
  if (den == 1)
    return num.str();
  return num.str() + "/" + den.str();
}

} // namespace lrbisim
