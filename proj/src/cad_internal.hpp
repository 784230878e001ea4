#pragma once

#include <vector>

#include "gromov/semialg.hpp"

namespace gromov::detail {

/// n rational points strictly between a < b, spread roughly evenly.
std::vector<Rational> points_between(const AlgebraicNumber& a, const AlgebraicNumber& b,
                                     std::size_t n);

/// Distinct roots of q(., y) inside (wlo, whi) for an algebraic y. Candidates
/// come from Res_y(q, m_y); each is kept when refinement cannot separate
/// q from zero at width 2^-64.
std::vector<AlgebraicNumber> fiber_roots_over(const MultiPoly& q, const AlgebraicNumber& y,
                                              const Rational& wlo, const Rational& whi);

/// Exact roots of q(., y) inside (wlo, whi) for rational y.
std::vector<AlgebraicNumber> fiber_roots_at(const MultiPoly& q, const Rational& y,
                                            const Rational& wlo, const Rational& whi);

/// Sign of a bivariate p at (x, y). Exact when a coordinate is rational;
/// otherwise `known_zero` decides vanishing and interval refinement the sign.
int sign_at_point(const MultiPoly& p, const AlgebraicNumber& x, const AlgebraicNumber& y,
                  bool known_zero);

/// True when q(x, y) = 0 survives refinement to width 2^-64.
bool vanishes_numerically(const MultiPoly& q, AlgebraicNumber x, AlgebraicNumber y);

}  // namespace gromov::detail
