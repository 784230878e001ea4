#pragma once

#include <optional>

#include "gromov/rational.hpp"
#include "gromov/upoly.hpp"

namespace gromov {

/// A real algebraic number: the unique root of a square-free polynomial in
/// an open rational isolating interval. Rational values are stored exactly
/// (degenerate interval lo == hi).
class AlgebraicNumber {
 public:
  AlgebraicNumber() : AlgebraicNumber(Rational(0)) {}
  explicit AlgebraicNumber(const Rational& value);
  /// `poly` need not be square-free; `iv` must isolate exactly one root.
  AlgebraicNumber(const UPoly& poly, const Interval& iv);

  bool is_rational() const { return lo_ == hi_; }
  const Rational& rational_value() const;
  const UPoly& poly() const { return poly_; }
  const Rational& lo() const { return lo_; }
  const Rational& hi() const { return hi_; }
  Interval interval() const { return {lo_, hi_}; }

  /// Shrinks the isolating interval to width <= w (may become exact).
  void refine(const Rational& w);
  /// Copy refined to width <= w.
  AlgebraicNumber refined(const Rational& w) const;

  /// Nearest double (refines a private copy to ~1e-18).
  double to_double() const;

  /// A rational strictly between this number and `other` (this < other).
  friend Rational rational_between(const AlgebraicNumber& a, const AlgebraicNumber& b);

 private:
  UPoly poly_;
  Rational lo_;
  Rational hi_;
};

/// Exact comparison: -1, 0, +1.
int compare(const AlgebraicNumber& a, const AlgebraicNumber& b);
int compare(const AlgebraicNumber& a, const Rational& q);

/// Exact sign of p at a rational point.
int sign_at(const UPoly& p, const Rational& x);
/// Exact sign of p at an algebraic point: zero detected through the gcd
/// with the defining polynomial, nonzero signs by interval refinement.
int sign_at(const UPoly& p, const AlgebraicNumber& x);

/// Roots of p strictly inside (lo, hi) as sorted algebraic numbers.
std::vector<AlgebraicNumber> real_roots(const UPoly& p, const Interval& range);

}  // namespace gromov
