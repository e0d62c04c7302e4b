#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace stsg {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Parses "13/84" or a bare integer like "1".
Rational parse_rational(const std::string& text);

// Canonical "num/den" form; the denominator is always printed.
std::string format_rational(const Rational& r);

Rational rational_pow(const Rational& base, unsigned exp);

double rational_to_double(const Rational& r);

}  // namespace stsg
