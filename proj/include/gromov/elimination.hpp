#pragma once

#include <cstddef>

#include "gromov/multipoly.hpp"

namespace gromov {

/// a / b when b divides a exactly; throws PolyError otherwise.
MultiPoly divide_exact(const MultiPoly& a, const MultiPoly& b);

/// A nonzero multiple of the pseudo-remainder of a by b in `var`.
MultiPoly pseudo_remainder(const MultiPoly& a, const MultiPoly& b, std::size_t var);

/// Scales p so its lex-leading coefficient is 1 (zero stays zero).
MultiPoly make_monic(const MultiPoly& p);

/// Greatest common divisor over Q, normalized monic in lex order. Computed
/// recursively by primitive remainder sequences in the highest used variable.
MultiPoly poly_gcd(const MultiPoly& a, const MultiPoly& b);

/// gcd of the coefficients of p viewed as a polynomial in `var`.
MultiPoly content_in(const MultiPoly& p, std::size_t var);
MultiPoly primitive_part_in(const MultiPoly& p, std::size_t var);

/// p / gcd(p, dp/dvar): removes repeated factors and the content in `var`.
MultiPoly squarefree_in(const MultiPoly& p, std::size_t var);

/// Sylvester resultant eliminating `var`, computed with fraction-free
/// (Bareiss) elimination. Res(p, c) = c^deg(p) for a nonzero constant c.
MultiPoly resultant(const MultiPoly& p, const MultiPoly& q, std::size_t var);

/// Res(p, dp/dvar).
MultiPoly discriminant(const MultiPoly& p, std::size_t var);

}  // namespace gromov
