#include "usp/rational.hpp"

#include <cctype>

namespace usp {

bool is_integer(const Rational& r) { return denominator_of(r) == 1; }

bool has_finite_decimal(const Rational& r) {
  Integer d = denominator_of(r);
  while (d % 2 == 0) d /= 2;
  while (d % 5 == 0) d /= 5;
  return d == 1;
}

std::string to_string(const Rational& r) {
  if (is_integer(r)) return numerator_of(r).str();
  if (!has_finite_decimal(r)) return numerator_of(r).str() + "/" + denominator_of(r).str();
  Integer num = numerator_of(r);
  Integer den = denominator_of(r);
  bool negative = num < 0;
  if (negative) num = -num;
  unsigned digits = 0;
  Integer scale = 1;
  while (scale % den != 0) {
    scale *= 10;
    ++digits;
  }
  Integer scaled = num * (scale / den);
  std::string s = scaled.str();
  while (s.size() <= digits) s.insert(s.begin(), '0');
  s.insert(s.end() - digits, '.');
  return negative ? "-" + s : s;
}

std::optional<Rational> parse_decimal(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '-') {
    negative = true;
    ++i;
  }
  Integer mantissa = 0;
  int exponent = 0;
  bool any_digit = false;
  for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
    mantissa = mantissa * 10 + (text[i] - '0');
    any_digit = true;
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      mantissa = mantissa * 10 + (text[i] - '0');
      --exponent;
      any_digit = true;
    }
  }
  if (!any_digit) return std::nullopt;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) exp_negative = text[i++] == '-';
    int e = 0;
    bool exp_digit = false;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      e = e * 10 + (text[i] - '0');
      exp_digit = true;
    }
    if (!exp_digit) return std::nullopt;
    exponent += exp_negative ? -e : e;
  }
  if (i != text.size()) return std::nullopt;
  Rational value = Rational(mantissa);
  Rational ten = 10;
  if (exponent > 0) value *= pow(ten, static_cast<unsigned>(exponent));
  if (exponent < 0) value /= pow(ten, static_cast<unsigned>(-exponent));
  return negative ? Rational(-value) : value;
}

Rational pow(const Rational& base, unsigned exponent) {
  Rational result = 1;
  Rational b = base;
  while (exponent > 0) {
    if (exponent & 1u) result *= b;
    b *= b;
    exponent >>= 1u;
  }
  return result;
}

}  // namespace usp
