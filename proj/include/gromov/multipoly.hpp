#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gromov/rational.hpp"

namespace gromov {

using Exponents = std::vector<unsigned>;

class PolyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sparse multivariate polynomial with rational coefficients.
///
/// Terms are kept in lexicographic exponent order with variable 0 most
/// significant, so the last entry is the lex-leading term. Zero coefficients
/// are never stored; the zero polynomial has no terms.
class MultiPoly {
 public:
  MultiPoly() = default;
  explicit MultiPoly(std::size_t nvars) : nvars_(nvars) {}

  static MultiPoly constant(std::size_t nvars, const Rational& c);
  static MultiPoly variable(std::size_t nvars, std::size_t var);
  static MultiPoly monomial(const Exponents& e, const Rational& c);
  /// Univariate polynomial in `var` from dense coefficients (index = power).
  static MultiPoly from_dense(std::size_t nvars, std::size_t var,
                              std::span<const Rational> coeffs);

  std::size_t nvars() const { return nvars_; }
  const std::map<Exponents, Rational>& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Constant term value (0 if absent).
  Rational constant_term() const;

  /// Max exponent sum over terms; 0 for the zero polynomial.
  unsigned total_degree() const;
  /// Degree in `var`; 0 for the zero polynomial.
  unsigned degree_in(std::size_t var) const;
  bool depends_on(std::size_t var) const;
  /// Indices of variables with a positive exponent somewhere.
  std::vector<std::size_t> used_variables() const;

  /// Lex-leading coefficient.
  const Rational& leading_coefficient() const;

  void add_term(const Exponents& e, const Rational& c);

  MultiPoly operator-() const;
  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly& operator*=(const Rational& c);
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(MultiPoly a, const Rational& c) { return a *= c; }
  friend MultiPoly operator*(const Rational& c, MultiPoly a) { return a *= c; }
  friend bool operator==(const MultiPoly& a, const MultiPoly& b) = default;

  MultiPoly pow(unsigned e) const;

  Rational evaluate(std::span<const Rational> point) const;
  double evaluate(std::span<const double> point) const;

  /// Partial derivative; throws PolyError for an invalid index.
  MultiPoly derivative(std::size_t var) const;

  /// Coefficients of p viewed as a polynomial in `var` (index = power). The
  /// returned polynomials keep the same variable count with `var` absent.
  std::vector<MultiPoly> coefficients_in(std::size_t var) const;
  /// Inverse of coefficients_in.
  static MultiPoly from_coefficients(std::size_t nvars, std::size_t var,
                                     const std::vector<MultiPoly>& coeffs);
  /// Leading coefficient in `var`.
  MultiPoly leading_coefficient_in(std::size_t var) const;

  /// Replaces `var` by the rational `value`.
  MultiPoly specialize(std::size_t var, const Rational& value) const;
  /// Replaces `var` by a polynomial in the same variable set.
  MultiPoly substitute(std::size_t var, const MultiPoly& value) const;
  /// Substitutes every variable i by values[i] (all values share nvars).
  MultiPoly compose(std::span<const MultiPoly> values) const;
  /// Renames variable i to mapping[i] inside a ring of new_nvars variables.
  MultiPoly remap(std::size_t new_nvars, std::span<const std::size_t> mapping) const;

  /// Dense coefficients of a polynomial that only uses `var`.
  std::vector<Rational> dense_in(std::size_t var) const;

  /// Text in the `x1..xd` grammar accepted by parse_poly.
  std::string to_string() const;

 private:
  std::size_t nvars_ = 0;
  std::map<Exponents, Rational> terms_;
};

}  // namespace gromov
