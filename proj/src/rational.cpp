#include "nonlocal/rational.hpp"

#include <limits>

namespace nonlocal {

std::string to_string(const Rational& r) {
  std::string out = numerator(r).str();
  if (denominator(r) != 1) {
    out += "/";
    out += denominator(r).str();
  }
  return out;
}

Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(text));
    BigInt num(text.substr(0, slash));
    BigInt den(text.substr(slash + 1));
    return make_rational(num, den);
  } catch (const std::runtime_error&) {
    fail(ErrorCode::ParseError, "cannot parse rational '" + text + "'");
  }
}

std::int64_t checked_int64(const BigInt& value, const char* what) {
  if (value > std::numeric_limits<std::int64_t>::max() ||
      value < std::numeric_limits<std::int64_t>::min()) {
    fail(ErrorCode::ParseError,
         std::string(what) + " does not fit in a 64-bit integer");
  }
  return value.convert_to<std::int64_t>();
}

}  // namespace nonlocal
