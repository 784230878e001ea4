#include "gromov/interval_eval.hpp"

#include <algorithm>

namespace gromov {

namespace {

Interval mul(const Interval& a, const Interval& b) {
  Rational p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

Interval ipow(const Interval& a, unsigned e) {
  if (e == 0) return {1, 1};
  if (e % 2 == 0 && a.lo < 0 && a.hi > 0) {
    Rational m = std::max(power(a.lo, e), power(a.hi, e));
    return {0, m};
  }
  Rational x = power(a.lo, e), y = power(a.hi, e);
  return {std::min(x, y), std::max(x, y)};
}

}  // namespace

Interval enclose(const MultiPoly& p, std::span<const Interval> box) {
  if (box.size() < p.nvars()) throw PolyError("enclose: box dimension too small");
  Interval acc{0, 0};
  for (const auto& [e, c] : p.terms()) {
    Interval t{c, c};
    for (std::size_t v = 0; v < e.size(); ++v)
      if (e[v] > 0) t = mul(t, ipow(box[v], e[v]));
    acc.lo += t.lo;
    acc.hi += t.hi;
  }
  return acc;
}

}  // namespace gromov
