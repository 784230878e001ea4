#include <algorithm>
#include <cmath>

#include "cad_internal.hpp"
#include "gromov/elimination.hpp"

namespace gromov {

namespace {

// Inserts into a sorted list; returns false if an equal value is present.
template <class Entry, class Key>
std::size_t insert_sorted(std::vector<Entry>& list, Entry e, Key key, bool& merged) {
  std::size_t i = 0;
  merged = false;
  for (; i < list.size(); ++i) {
    int c = compare(key(e), key(list[i]));
    if (c == 0) {
      merged = true;
      return i;
    }
    if (c < 0) break;
  }
  list.insert(list.begin() + static_cast<std::ptrdiff_t>(i), std::move(e));
  return i;
}

std::vector<BaseCell> line_cells(const std::vector<UPoly>& polys, const Interval& range) {
  std::vector<AlgebraicNumber> roots;
  for (const auto& p : polys) {
    if (p.is_zero()) throw PolyError("zero polynomial in decomposition input");
    if (p.degree() < 1) continue;
    for (auto& r : real_roots(p, range)) {
      bool merged = false;
      insert_sorted(roots, std::move(r), [](const AlgebraicNumber& a) -> const AlgebraicNumber& {
        return a;
      }, merged);
    }
  }
  std::vector<BaseCell> cells;
  AlgebraicNumber prev(range.lo);
  for (const auto& r : roots) {
    cells.push_back({BaseCell::Kind::Open, prev, r});
    cells.push_back({BaseCell::Kind::Point, r, r});
    prev = r;
  }
  cells.push_back({BaseCell::Kind::Open, prev, AlgebraicNumber(range.hi)});
  return cells;
}

bool divides(const MultiPoly& d, const MultiPoly& p) {
  try {
    divide_exact(p, d);
    return true;
  } catch (const PolyError&) {
    return false;
  }
}

// Pairwise coprime square-free factors of the inputs, with x1-factors on the
// box edges removed.
std::vector<MultiPoly> coprime_basis(const std::vector<MultiPoly>& inputs, const Rational& lo,
                                     const Rational& hi) {
  std::vector<MultiPoly> pending;
  for (const auto& p : inputs) {
    MultiPoly c = content_in(p, 0);
    if (!c.is_constant()) pending.push_back(squarefree_in(c, 1));
    MultiPoly prim = divide_exact(p, c);
    if (!prim.depends_on(0)) continue;
    prim = squarefree_in(prim, 0);
    for (const Rational& edge : {lo, hi}) {
      MultiPoly lin = MultiPoly::variable(2, 0) - MultiPoly::constant(2, edge);
      if (prim.specialize(0, edge).is_zero()) prim = divide_exact(prim, lin);
    }
    if (!prim.is_constant()) pending.push_back(prim);
  }
  std::vector<MultiPoly> basis;
  while (!pending.empty()) {
    MultiPoly g = make_monic(pending.back());
    pending.pop_back();
    if (g.is_constant()) continue;
    bool split = false;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      MultiPoly h = poly_gcd(g, basis[i]);
      if (h.is_constant()) continue;
      MultiPoly b = basis[i];
      basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(i));
      for (MultiPoly part : {divide_exact(b, h), divide_exact(g, h), h})
        if (!part.is_constant()) pending.push_back(part);
      split = true;
      break;
    }
    if (!split) basis.push_back(g);
  }
  std::sort(basis.begin(), basis.end(), [](const MultiPoly& a, const MultiPoly& b) {
    return a.to_string() < b.to_string();
  });
  return basis;
}

struct FiberEntry {
  AlgebraicNumber value;
  std::size_t basis_index;
  unsigned root_index;
  std::vector<std::size_t> vanishing;
};

}  // namespace

Decomposition cad_line(const std::vector<MultiPoly>& polys, const Interval& range) {
  if (!(range.lo < range.hi)) throw std::invalid_argument("empty decomposition range");
  Decomposition d;
  d.dim = 1;
  d.box_lo = range.lo;
  d.box_hi = range.hi;
  d.inputs = polys;
  std::vector<UPoly> ups;
  for (const auto& p : polys) {
    if (p.is_zero()) throw PolyError("zero polynomial in decomposition input");
    if (p.used_variables().size() > 1 || (p.nvars() > 1 && p.depends_on(1)))
      throw PolyError("cad_line needs polynomials in x1 only");
    ups.push_back(UPoly::from_multi(p));
    d.max_input_degree = std::max(d.max_input_degree, p.total_degree());
  }
  d.cells = line_cells(ups, range);
  d.branches.assign(d.cells.size(), {});
  for (std::size_t c = 0; c < d.cells.size(); ++c) {
    const BaseCell& cell = d.cells[c];
    Slice s;
    s.cell = c;
    s.kind = cell.is_point() ? SliceKind::Section : SliceKind::Sector;
    s.dimension = cell.is_point() ? 0 : 1;
    for (const auto& u : ups) {
      if (cell.is_point()) {
        s.signs.push_back(sign_at(u, cell.point()));
      } else {
        s.signs.push_back(u.sign_at(cell.sample()));
      }
    }
    d.cell_slice_start.push_back(d.slices.size());
    s.id = d.slices.size();
    d.slices.push_back(std::move(s));
  }
  return d;
}

Decomposition cad_plane(const std::vector<MultiPoly>& polys, const Rational& lo,
                        const Rational& hi) {
  if (!(lo < hi)) throw std::invalid_argument("empty decomposition box");
  Decomposition d;
  d.dim = 2;
  d.box_lo = lo;
  d.box_hi = hi;
  for (const auto& p : polys) {
    if (p.is_zero()) throw DegenerateCellError("zero polynomial in decomposition input");
    if (p.nvars() != 2) throw PolyError("cad_plane needs polynomials in x1, x2");
    d.max_input_degree = std::max(d.max_input_degree, p.total_degree());
  }
  d.inputs = polys;
  d.basis = coprime_basis(polys, lo, hi);

  // projection onto the base variable x2
  auto add_proj = [&](MultiPoly q) {
    if (q.is_zero() || q.is_constant()) return;
    q = make_monic(q);
    if (std::find(d.projection.begin(), d.projection.end(), q) == d.projection.end())
      d.projection.push_back(q);
  };
  std::vector<std::size_t> fiber_basis;
  for (std::size_t i = 0; i < d.basis.size(); ++i) {
    const MultiPoly& q = d.basis[i];
    if (!q.depends_on(0)) {
      add_proj(q);
      continue;
    }
    fiber_basis.push_back(i);
    add_proj(q.leading_coefficient_in(0));
    add_proj(discriminant(q, 0));
    add_proj(q.specialize(0, lo));
    add_proj(q.specialize(0, hi));
  }
  for (std::size_t a = 0; a < fiber_basis.size(); ++a)
    for (std::size_t b = a + 1; b < fiber_basis.size(); ++b)
      add_proj(resultant(d.basis[fiber_basis[a]], d.basis[fiber_basis[b]], 0));
  std::vector<UPoly> base_polys;
  for (const auto& q : d.projection) {
    d.max_projection_degree = std::max(d.max_projection_degree, q.total_degree());
    base_polys.push_back(UPoly::from_multi(q));
  }
  d.cells = line_cells(base_polys, {lo, hi});

  // divisibility of inputs by basis elements, for zero decisions
  std::vector<std::vector<bool>> divides_input(d.basis.size(),
                                               std::vector<bool>(polys.size(), false));
  for (std::size_t i = 0; i < d.basis.size(); ++i)
    for (std::size_t j = 0; j < polys.size(); ++j) divides_input[i][j] = divides(d.basis[i], polys[j]);

  for (std::size_t c = 0; c < d.cells.size(); ++c) {
    const BaseCell& cell = d.cells[c];
    std::vector<FiberEntry> fiber;
    for (std::size_t i : fiber_basis) {
      std::vector<AlgebraicNumber> roots;
      if (cell.is_point()) {
        roots = detail::fiber_roots_over(d.basis[i], cell.point(), lo, hi);
      } else {
        roots = detail::fiber_roots_at(d.basis[i], cell.sample(), lo, hi);
      }
      for (unsigned k = 0; k < roots.size(); ++k) {
        bool merged = false;
        std::size_t at = insert_sorted(fiber, FiberEntry{roots[k], i, k + 1, {i}},
                                       [](const FiberEntry& e) -> const AlgebraicNumber& {
                                         return e.value;
                                       },
                                       merged);
        if (merged) {
          if (!cell.is_point())
            throw DegenerateCellError("distinct factors share a branch over an open cell");
          fiber[at].vanishing.push_back(i);
        }
      }
    }
    std::vector<NashBranch> branches;
    for (const auto& e : fiber) {
      NashBranch b;
      b.fiber = d.basis[e.basis_index];
      b.root_index = e.root_index;
      b.window_lo = lo;
      b.window_hi = hi;
      b.base = cell;
      b.basis_index = e.basis_index;
      branches.push_back(std::move(b));
    }
    // base-only factors vanishing over a point cell zero the whole fiber
    std::vector<std::size_t> cell_zero;
    if (cell.is_point()) {
      for (std::size_t i = 0; i < d.basis.size(); ++i) {
        if (d.basis[i].depends_on(0)) continue;
        if (sign_at(UPoly::from_multi(d.basis[i]), cell.point()) == 0) cell_zero.push_back(i);
      }
    }
    auto zero_by = [&](const std::vector<std::size_t>& vanish, std::size_t input) {
      for (std::size_t i : vanish)
        if (divides_input[i][input]) return true;
      for (std::size_t i : cell_zero)
        if (divides_input[i][input]) return true;
      return false;
    };

    d.cell_slice_start.push_back(d.slices.size());
    const std::size_t q = fiber.size();
    AlgebraicNumber y = cell.is_point() ? cell.point() : AlgebraicNumber(cell.sample());
    AlgebraicNumber bottom(lo), top(hi);
    for (std::size_t p = 0; p <= q; ++p) {
      if (p > 0) {
        Slice sec;
        sec.kind = SliceKind::Section;
        sec.cell = c;
        sec.lower = sec.upper = p;
        sec.dimension = cell.is_point() ? 0 : 1;
        for (std::size_t j = 0; j < polys.size(); ++j) {
          sec.signs.push_back(detail::sign_at_point(polys[j], fiber[p - 1].value, y,
                                                    zero_by(fiber[p - 1].vanishing, j)));
        }
        sec.id = d.slices.size();
        d.slices.push_back(std::move(sec));
      }
      Slice sec;
      sec.kind = SliceKind::Sector;
      sec.cell = c;
      sec.lower = p;
      sec.upper = p + 1;
      sec.dimension = cell.is_point() ? 1 : 2;
      const AlgebraicNumber& a = p == 0 ? bottom : fiber[p - 1].value;
      const AlgebraicNumber& b = p == q ? top : fiber[p].value;
      AlgebraicNumber x(rational_between(a, b));
      for (std::size_t j = 0; j < polys.size(); ++j)
        sec.signs.push_back(detail::sign_at_point(polys[j], x, y, zero_by({}, j)));
      sec.id = d.slices.size();
      d.slices.push_back(std::move(sec));
    }
    d.branches.push_back(std::move(branches));
  }
  return d;
}

Decomposition decompose(const Presentation& pres) {
  auto polys = pres.polynomials();
  if (pres.vars == 1) return cad_line(polys, {pres.box_lo(), pres.box_hi()});
  if (pres.vars == 2) return cad_plane(polys, pres.box_lo(), pres.box_hi());
  throw PresentationError("decomposition supports 1 or 2 variables");
}

std::size_t Decomposition::cell_of(const Rational& y) const {
  if (!(y > box_lo && y < box_hi)) throw std::out_of_range("point outside the open box");
  // cells alternate open, point, open, ...
  std::size_t lo = 0, hi = cells.size();
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (compare(cells[mid].lo, y) <= 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (!cells[lo].contains(y)) {
    for (std::size_t c = 0; c < cells.size(); ++c)
      if (cells[c].contains(y)) return c;
    throw std::logic_error("no base cell contains the point");
  }
  return lo;
}

Decomposition::Fiber Decomposition::fiber_at(const Rational& y) const {
  if (dim != 2) throw std::logic_error("fiber_at needs a planar decomposition");
  Fiber f;
  f.cell = cell_of(y);
  for (const auto& b : branches[f.cell]) f.values.push_back(b.value_at(y));
  return f;
}

std::size_t Decomposition::slice_at(const Fiber& fiber, const Rational& x) const {
  if (!(x > box_lo && x < box_hi)) throw std::out_of_range("point outside the open box");
  std::size_t start = cell_slice_start[fiber.cell];
  for (std::size_t p = 0; p < fiber.values.size(); ++p) {
    int c = compare(fiber.values[p], x);
    if (c > 0) return start + 2 * p;      // sector below branch p+1
    if (c == 0) return start + 2 * p + 1;  // section p+1
  }
  return start + 2 * fiber.values.size();
}

std::size_t Decomposition::locate(std::span<const Rational> x) const {
  if (dim == 1) return cell_slice_start[cell_of(x[0])];
  return slice_at(fiber_at(x[1]), x[0]);
}

std::vector<std::vector<Rational>> Decomposition::rational_samples(std::size_t slice,
                                                                   std::size_t count) const {
  const Slice& s = slices.at(slice);
  const BaseCell& cell = cells[s.cell];
  std::vector<std::vector<Rational>> out;
  if (dim == 1) {
    for (const auto& y : cell.samples(count)) out.push_back({y});
    return out;
  }
  std::size_t nb = 1, nx = count;
  if (!cell.is_point()) {
    nb = s.kind == SliceKind::Sector
             ? static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count))))
             : count;
    nx = s.kind == SliceKind::Sector ? (count + nb - 1) / nb : 1;
  }
  for (const auto& y : cell.samples(nb)) {
    std::vector<AlgebraicNumber> vals;
    for (const auto& b : branches[s.cell]) vals.push_back(b.value_at(y));
    if (s.kind == SliceKind::Section) {
      const AlgebraicNumber& v = vals[s.lower - 1];
      if (v.is_rational()) out.push_back({v.rational_value(), y});
      continue;
    }
    AlgebraicNumber a = s.lower == 0 ? AlgebraicNumber(box_lo) : vals[s.lower - 1];
    AlgebraicNumber b = s.upper > vals.size() ? AlgebraicNumber(box_hi) : vals[s.upper - 1];
    for (const auto& x : detail::points_between(a, b, nx)) out.push_back({x, y});
  }
  return out;
}

std::vector<Slice> slices_of(const Presentation& pres, const Decomposition& decomp) {
  auto polys = pres.polynomials();
  std::vector<std::size_t> map;
  for (const auto& p : polys) {
    auto it = std::find(decomp.inputs.begin(), decomp.inputs.end(), p);
    if (it == decomp.inputs.end())
      throw PresentationError("decomposition was not built from this presentation");
    map.push_back(static_cast<std::size_t>(it - decomp.inputs.begin()));
  }
  std::vector<Slice> out;
  std::vector<int> signs(polys.size());
  for (const auto& s : decomp.slices) {
    for (std::size_t i = 0; i < map.size(); ++i) signs[i] = s.signs[map[i]];
    if (pres.satisfied_by(signs)) out.push_back(s);
  }
  return out;
}

int max_dimension(const Presentation& pres) {
  if (pres.vars > 2) throw PresentationError("max_dimension supports at most 2 variables");
  Decomposition d = decompose(pres);
  int best = -1;
  for (const auto& s : slices_of(pres, d)) best = std::max(best, static_cast<int>(s.dimension));
  return best;
}

}  // namespace gromov
