#include <algorithm>

#include "engine_util.hpp"
#include "gromov/elimination.hpp"

namespace gromov {

namespace detail {

Expr fold(const Expr& e, std::size_t nvars) {
  if (e->kind == NodeKind::Var || e->kind == NodeKind::Const || e->kind == NodeKind::Affine)
    return e;
  auto p = as_polynomial(e, nvars);
  if (!p) return e;
  std::vector<Expr> ids;
  for (std::size_t i = 0; i < nvars; ++i) ids.push_back(expr::var(i));
  return expr::apply(*p, ids);
}

std::vector<Expr> fold(std::vector<Expr> es, std::size_t nvars) {
  for (auto& e : es) e = fold(e, nvars);
  return es;
}

}  // namespace detail

using namespace detail;

Expr branch_expr(const NashBranch& b, const Expr& y) {
  if (y->kind == NodeKind::Const) return expr::constant(b.value_at(y->constant));
  const MultiPoly& f = b.fiber;
  if (f.degree_in(0) == 1) {
    auto cs = f.coefficients_in(0);
    if (cs[1].is_constant()) {
      // z = -c0(y) / c1; reindex the base variable to slot 0
      MultiPoly c0 = cs[0] * (Rational(-1) / cs[1].constant_term());
      std::vector<std::size_t> map{0, 0};
      MultiPoly g = c0.remap(1, map);
      return expr::apply(g, {y});
    }
  }
  return expr::branch(f, {y}, b.window_lo, b.window_hi, b.root_index);
}

namespace detail {

Expr between(const Expr& t, const AlgebraicNumber& lo, const AlgebraicNumber& hi) {
  return expr::blend(t, expr::constant(hi), expr::constant(lo));
}

// fiber coordinate at position p over base expression y
Expr level(const Decomposition& dec, std::size_t cell, std::size_t p, const Expr& y) {
  if (p == 0) return expr::constant(dec.box_lo);
  const auto& br = dec.branches[cell];
  if (p == br.size() + 1) return expr::constant(dec.box_hi);
  return branch_expr(br[p - 1], y);
}

TriangularChart slice_chart(const Decomposition& dec, const Slice& s) {
  const BaseCell& c = dec.cells[s.cell];
  if (dec.dim == 1) {
    if (c.is_point()) return TriangularChart(0, {expr::constant(c.point())});
    return TriangularChart(1, fold(std::vector<Expr>{between(expr::var(0), c.lo, c.hi)}, 1));
  }
  bool sector = s.kind == SliceKind::Sector;
  std::size_t l = (c.is_point() ? 0 : 1) + (sector ? 1 : 0);
  // base coordinate reads the last source variable
  Expr y = c.is_point() ? expr::constant(c.point())
                        : between(expr::var(l - 1), c.lo, c.hi);
  y = fold(y, l);
  Expr lo = level(dec, s.cell, s.lower, y);
  Expr x;
  if (sector) {
    Expr hi = level(dec, s.cell, s.lower + 1, y);
    x = expr::blend(expr::var(0), hi, lo);
  } else {
    x = lo;
  }
  return TriangularChart(l, fold(std::vector<Expr>{x, y}, l));
}

}  // namespace detail

Resolution cells_resolution(const Presentation& pres) {
  if (pres.vars < 1 || pres.vars > 2)
    throw EngineError("cell charts are implemented for one or two variables");
  Decomposition dec = decompose(pres);
  Resolution res;
  res.dim = pres.vars;
  res.alpha = MultiIndex(std::vector<unsigned>(pres.vars, 0));
  res.domain_lo.assign(pres.vars, pres.box_lo());
  res.domain_hi.assign(pres.vars, pres.box_hi());
  res.shrink_n = pres.box_n > 1 ? pres.box_n : 0;
  for (const auto& s : slices_of(pres, dec)) {
    ChartRecord rec;
    rec.chart = slice_chart(dec, s);
    rec.provenance = "cell";
    rec.degree = rec.chart.degree();
    if (rec.chart.source_dim > 0)
      rec.extends_continuously = extends_continuously(rec.chart.components, rec.chart.source_dim);
    res.charts.push_back(std::move(rec));
  }
  return res;
}

}  // namespace gromov
