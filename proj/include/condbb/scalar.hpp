#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace condbb {

/// Exact rational scalar. Expression templates are off so that `auto`
/// behaves the same for Rational and double in generic code.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

template <class T>
struct NumTraits;

template <>
struct NumTraits<double> {
  static constexpr bool exact = false;
  static constexpr const char* name = "float";
  static double default_tolerance() { return 1e-9; }
  static double pivot_tolerance() { return 1e-12; }
  // float noise expected when summing a handful of values of size `scale`
  static double rounding(double scale) { return 16 * std::numeric_limits<double>::epsilon() * std::abs(scale); }
};

template <>
struct NumTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* name = "exact";
  static Rational default_tolerance() { return Rational(0); }
  static Rational pivot_tolerance() { return Rational(0); }
  static Rational rounding(const Rational&) { return Rational(0); }
};

template <class T>
concept Scalar = requires { NumTraits<T>::exact; };

inline double abs_value(double x) { return std::fabs(x); }
inline Rational abs_value(const Rational& x) { return boost::multiprecision::abs(x); }

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const Rational&) { return true; }

/// Parses a plain decimal literal ("-12.5e-3") into an exact rational.
inline Rational rational_from_decimal(std::string_view text) {
  std::string digits;
  bool negative = false;
  std::int64_t exponent = 0;
  std::size_t i = 0;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) negative = text[i++] == '-';
  bool seen_digit = false;
  bool after_point = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      seen_digit = true;
      if (after_point) --exponent;
    } else if (c == '.' && !after_point) {
      after_point = true;
    } else if (c == 'e' || c == 'E') {
      std::int64_t e = 0;
      const char* first = text.data() + i + 1;
      if (first < text.data() + text.size() && *first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), e);
      if (ec != std::errc{} || ptr != text.data() + text.size())
        throw std::invalid_argument("malformed exponent in '" + std::string(text) + "'");
      exponent += e;
      i = text.size();
      break;
    } else {
      throw std::invalid_argument("malformed decimal '" + std::string(text) + "'");
    }
  }
  if (!seen_digit) throw std::invalid_argument("malformed decimal '" + std::string(text) + "'");
  // GMP reads a leading 0 as an octal prefix
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  BigInt mantissa(digits);
  BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
  Rational value = exponent < 0 ? Rational(mantissa, scale) : Rational(mantissa * scale);
  return negative ? Rational(-value) : value;
}

/// The decimal a double was most likely written as: its shortest
/// round-trip representation, read back exactly. 0.1 maps to 1/10.
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value has no rational form");
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), x);
  if (ec != std::errc{}) throw std::invalid_argument("cannot format double");
  return rational_from_decimal(std::string_view(buffer, static_cast<std::size_t>(ptr - buffer)));
}

template <class T>
T scalar_from_double(double x);

template <>
inline double scalar_from_double<double>(double x) { return x; }

template <>
inline Rational scalar_from_double<Rational>(double x) { return rational_from_double(x); }

}  // namespace condbb
