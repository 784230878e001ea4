#pragma once

#include <cstddef>
#include <string_view>

#include "gromov/multipoly.hpp"

namespace gromov {

/// Parses the text grammar: variables x1..xd, integer or p/q (and decimal)
/// literals, + - * ^ and parentheses. Whitespace is ignored. Exponents must
/// be non-negative integers. Throws PolyError with the offending position.
MultiPoly parse_poly(std::string_view text, std::size_t nvars);

/// Smallest d such that every variable in the text is among x1..xd.
std::size_t max_variable_index(std::string_view text);

}  // namespace gromov
