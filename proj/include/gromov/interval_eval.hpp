#pragma once

#include <span>

#include "gromov/multipoly.hpp"
#include "gromov/upoly.hpp"

namespace gromov {

/// Enclosure of p over the rational box prod [lo_i, hi_i] by naive interval
/// arithmetic (sound, possibly loose).
Interval enclose(const MultiPoly& p, std::span<const Interval> box);

}  // namespace gromov
