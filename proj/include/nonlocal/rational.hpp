#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>

#include "nonlocal/error.hpp"

namespace nonlocal {

// Exact rational scalar used for distributions, classical values and the
// protocol bookkeeping that must hold as identities rather than within a
// tolerance.  Always stored in lowest terms with a positive denominator;
// components are arbitrary-precision integers so products of many small
// probabilities cannot overflow.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) fail(ErrorCode::InvalidArgument, "rational with denominator 0");
  return Rational(num, den);
}

inline Rational make_rational(std::int64_t num, std::int64_t den) {
  return make_rational(BigInt(num), BigInt(den));
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Prints "num/den", or just "num" for integers.
std::string to_string(const Rational& r);

// Accepts "num", "num/den" and plain decimal-free signs; used by the CLI.
Rational parse_rational(const std::string& text);

// Component extraction with an explicit range check, for file formats that
// store numerator and denominator as 64-bit integers.
std::int64_t checked_int64(const BigInt& value, const char* what);

}  // namespace nonlocal
