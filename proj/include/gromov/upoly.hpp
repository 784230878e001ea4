#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "gromov/multipoly.hpp"
#include "gromov/rational.hpp"

namespace gromov {

/// Raised by sturm_count when an endpoint is a root; the caller should
/// perturb or refine the interval.
class EndpointRootError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Open rational interval (lo, hi).
struct Interval {
  Rational lo;
  Rational hi;
  Rational width() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Dense univariate polynomial over the rationals, coefficient k of x^k.
/// The coefficient vector never has a zero leading entry.
class UPoly {
 public:
  UPoly() = default;
  explicit UPoly(std::vector<Rational> coeffs);

  /// Polynomial that uses at most one variable of `p`.
  static UPoly from_multi(const MultiPoly& p);
  MultiPoly to_multi(std::size_t nvars, std::size_t var) const;

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Rational>& coeffs() const { return c_; }
  const Rational& lc() const;

  Rational evaluate(const Rational& x) const;
  double evaluate(double x) const;
  int sign_at(const Rational& x) const { return sgn(evaluate(x)); }

  UPoly derivative() const;
  UPoly monic() const;
  /// Divides by |lc| so the leading coefficient is +-1 (sign-preserving).
  UPoly sign_normalized() const;

  UPoly operator-() const;
  friend UPoly operator+(const UPoly& a, const UPoly& b);
  friend UPoly operator-(const UPoly& a, const UPoly& b);
  friend UPoly operator*(const UPoly& a, const UPoly& b);
  friend bool operator==(const UPoly&, const UPoly&) = default;

  /// Quotient and remainder; throws for a zero divisor.
  static std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b);

 private:
  void trim();
  std::vector<Rational> c_;
};

/// Monic gcd (zero if both inputs are zero).
UPoly gcd(UPoly a, UPoly b);

/// p / gcd(p, p'), sign-normalized.
UPoly squarefree_part(const UPoly& p);

/// Signed remainder sequence p, p', -rem(p, p'), ...
std::vector<UPoly> sturm_chain(const UPoly& p);

/// Number of sign changes of the chain at x (zeros skipped).
int sign_variations(const std::vector<UPoly>& chain, const Rational& x);

/// Distinct real roots of p in the open interval (a, b). Requires a < b and
/// neither endpoint a root of the square-free part of p.
unsigned sturm_count(const UPoly& p, const Rational& a, const Rational& b);

/// Distinct real roots in (a, b) for a square-free p whose chain is given;
/// endpoints may be roots (they are not counted).
unsigned sturm_count_open(const std::vector<UPoly>& chain, const Rational& a,
                          const Rational& b);

/// Disjoint sorted isolating intervals for the distinct roots of p strictly
/// inside `range`. Each returned interval has non-root rational endpoints.
std::vector<Interval> isolate_real_roots(const UPoly& p, const Interval& range);

/// Bisects an isolating interval of the square-free p until its width is at
/// most `width`. Returns a degenerate interval [r, r] when a midpoint hits
/// the root exactly.
Interval refine_root(const UPoly& sqf, Interval iv, const Rational& width);

/// Roots in (lo, hi) of a double-coefficient polynomial, located by
/// recursive derivative splitting and bisection. Intended for simple roots
/// of low-degree polynomials.
std::vector<double> numeric_roots(const std::vector<double>& coeffs, double lo, double hi);

}  // namespace gromov
