#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace gromov {

/// Exact rational number. gmp keeps values canonical (reduced, positive
/// denominator) after every arithmetic operation.
using Rational = mpq_class;

/// a/b reduced. mpq_class(a, b) alone does not canonicalize.
inline Rational ratio(long a, long b) {
  Rational q(a, b);
  q.canonicalize();
  return q;
}

inline int sign(const Rational& q) { return sgn(q); }

inline double to_double(const Rational& q) { return q.get_d(); }

/// Canonical text form: "p" for integers, "p/q" otherwise.
inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Parses "p", "p/q", or a decimal literal such as "0.25" / "1e-3".
Rational parse_rational(std::string_view text);

/// Exact binary value of a finite double.
inline Rational from_double(double x) { return Rational(x); }

/// Best rational approximation with denominator <= max_den (continued
/// fractions). Used to recover small rational roots from floating estimates.
Rational best_approximation(double x, std::int64_t max_den);

/// Midpoint of (a, b).
inline Rational midpoint(const Rational& a, const Rational& b) {
  Rational m = (a + b) / 2;
  return m;
}

/// A dyadic rational within 2^-bits of x (round to nearest).
Rational round_dyadic(const Rational& x, unsigned bits);

inline Rational abs_value(const Rational& q) {
  Rational r = q;
  if (sgn(r) < 0) r = -r;
  return r;
}

/// base^e for small non-negative integer exponents.
Rational power(const Rational& base, unsigned e);

}  // namespace gromov
