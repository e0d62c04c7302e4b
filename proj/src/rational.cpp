#include "stsg/rational.hpp"

#include <stdexcept>

namespace stsg {

Rational parse_rational(const std::string& text) {
  try {
    auto slash = text.find('/');
    if (slash == std::string::npos) {
      return Rational(BigInt(text));
    }
    BigInt num(text.substr(0, slash));
    BigInt den(text.substr(slash + 1));
    if (den == 0) {
      throw std::invalid_argument("zero denominator");
    }
    return Rational(num, den);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad rational literal: '" + text + "'");
  }
}

std::string format_rational(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

Rational rational_pow(const Rational& base, unsigned exp) {
  Rational result = 1;
  for (unsigned i = 0; i < exp; ++i) {
    result *= base;
  }
  return result;
}

double rational_to_double(const Rational& r) {
  return r.convert_to<double>();
}

}  // namespace stsg
