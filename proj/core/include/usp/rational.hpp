#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace usp {

// Exact rationals. Soundness-relevant arithmetic never goes through floating point.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Integer denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

bool is_integer(const Rational& r);

// True when the value has a finite decimal expansion (denominator of the form 2^a 5^b).
bool has_finite_decimal(const Rational& r);

// Decimal text for finitely representable values ("2", "-0.25"); "n/d" otherwise.
std::string to_string(const Rational& r);

// Parses "12", "0.5", "1.25e-3" style literals exactly.
std::optional<Rational> parse_decimal(std::string_view text);

Rational pow(const Rational& base, unsigned exponent);

}  // namespace usp
