#include "gromov/charts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gromov/parallel.hpp"

namespace gromov {

TriangularChart::TriangularChart(std::size_t l, std::vector<Expr> comps)
    : source_dim(l), target_dim(comps.size()), components(std::move(comps)) {
  if (source_dim > target_dim) throw ChartError("chart source dimension exceeds target dimension");
  for (const auto& c : components) {
    if (!c) throw ChartError("null chart component");
    if (c->arity() > source_dim) throw ChartError("chart component reads a missing variable");
  }
  if (!triangular()) throw ChartError("chart is not triangular");
}

TriangularChart TriangularChart::identity(std::size_t d) {
  std::vector<Expr> comps;
  for (std::size_t i = 0; i < d; ++i) comps.push_back(expr::var(i));
  return TriangularChart(d, comps);
}

TriangularChart TriangularChart::affine_box(const std::vector<Rational>& lo,
                                            const std::vector<Rational>& hi) {
  if (lo.size() != hi.size()) throw ChartError("affine box: bound length mismatch");
  std::vector<Expr> comps;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    std::vector<Rational> c(i + 1, Rational(0));
    c[i] = hi[i] - lo[i];
    comps.push_back(lo[i] == 0 && hi[i] == 1 ? expr::var(i) : expr::affine(lo[i], c));
  }
  return TriangularChart(lo.size(), comps);
}

bool TriangularChart::triangular() const {
  std::size_t shift = target_dim - source_dim;
  for (std::size_t i = 0; i < components.size(); ++i) {
    std::size_t first = i > shift ? i - shift : 0;
    std::uint64_t allowed = 0;
    for (std::size_t j = first; j < source_dim; ++j) allowed |= std::uint64_t{1} << j;
    if (components[i]->support & ~allowed) return false;
  }
  return true;
}

unsigned TriangularChart::degree() const {
  unsigned d = 1;
  for (const auto& c : components) d = std::max(d, c->degree);
  return d;
}

std::vector<double> TriangularChart::operator()(std::span<const double> t) const {
  if (t.size() != source_dim) throw ChartError("chart evaluated at a point of the wrong dimension");
  return eval(components, t);
}

TriangularChart compose(const TriangularChart& outer, const TriangularChart& inner) {
  if (inner.target_dim != outer.source_dim) throw ChartError("compose: dimension mismatch");
  std::vector<Expr> comps;
  for (const auto& c : outer.components) comps.push_back(expr::compose(c, inner.components));
  return TriangularChart(inner.source_dim, comps);
}

JetTable jet_eval(const TriangularChart& chart, std::span<const Rational> point,
                  const MultiIndex& alpha) {
  if (point.size() != chart.source_dim) throw ChartError("jet_eval: point dimension mismatch");
  return jet_eval(chart.components, point, alpha);
}

JetTable jet_eval(std::span<const Expr> components, std::span<const Rational> point,
                  const MultiIndex& alpha) {
  if (alpha.size() != point.size()) throw ChartError("jet_eval: multi-index length mismatch");
  for (const auto& x : point)
    if (x <= 0 || x >= 1) throw ChartError("jet_eval: point outside the open cube");
  JetTable t;
  t.betas = mi_all_below(alpha);
  unsigned order = alpha.weight();
  try {
    auto jets = eval_jets_exact(components, point, order);
    t.exact = true;
    for (const auto& j : jets) {
      std::vector<Rational> ex;
      std::vector<double> dv;
      for (const auto& b : t.betas) {
        ex.push_back(j.derivative(b.e));
        dv.push_back(ex.back().get_d());
      }
      t.exact_values.push_back(std::move(ex));
      t.values.push_back(std::move(dv));
    }
    return t;
  } catch (const NotExactError&) {
  }
  std::vector<double> p;
  for (const auto& x : point) p.push_back(x.get_d());
  auto jets = eval_jets(components, p, order);
  for (const auto& j : jets) {
    std::vector<double> dv;
    for (const auto& b : t.betas) dv.push_back(j.derivative(b.e));
    t.values.push_back(std::move(dv));
  }
  return t;
}

MultiIndex alpha_for_dim(const MultiIndex& alpha, std::size_t l) {
  if (alpha.size() == l) return alpha;
  return mi_top(l, alpha.weight());
}

namespace {

// boundary rows sit 1/m^3 inside the cube, so a derivative that blows up at
// the boundary keeps growing under refinement instead of looking converged
double clamp_coord(unsigned k, unsigned m, double floor) {
  double delta = std::max(floor, 1.0 / (static_cast<double>(m) * m * m));
  double x = static_cast<double>(k) / m;
  return std::clamp(x, delta, 1.0 - delta);
}

}  // namespace

NormReport norm_estimate(std::span<const Expr> components, std::size_t l, const MultiIndex& alpha,
                         const NormPolicy& policy) {
  if (alpha.size() != l) throw ChartError("norm_estimate: multi-index length mismatch");
  NormReport rep;
  rep.alpha = alpha;
  rep.betas = mi_all_below(alpha);
  rep.tolerance = policy.tolerance;
  rep.sup.assign(rep.betas.size(), 0.0);
  std::vector<unsigned> weights;
  for (const auto& b : rep.betas) weights.push_back(b.weight());

  auto finish = [&] {
    rep.norm = 0;
    rep.derivative_norm = 0;
    for (std::size_t b = 0; b < rep.sup.size(); ++b) {
      rep.norm = std::max(rep.norm, rep.sup[b]);
      if (weights[b] >= 1) rep.derivative_norm = std::max(rep.derivative_norm, rep.sup[b]);
    }
  };

  if (l == 0) {
    for (double v : eval(components, std::span<const double>{}))
      rep.sup[0] = std::max(rep.sup[0], std::fabs(v));
    finish();
    rep.converged = true;
    rep.history.push_back({0, rep.norm});
    return rep;
  }
  if (l > 3) throw ChartError("norm_estimate supports at most three variables");

  unsigned m0 = policy.initial_grid ? policy.initial_grid : (l == 1 ? 128 : (l == 2 ? 16 : 8));
  unsigned mmax = policy.max_grid ? policy.max_grid : (l == 1 ? 4096 : (l == 2 ? 128 : 32));
  mmax = std::max(mmax, m0);
  unsigned order = alpha.weight();
  auto layout = JetLayout::get(l, order);
  std::vector<std::size_t> monomial_of;
  for (const auto& b : rep.betas) monomial_of.push_back(layout->at(b.e));

  std::vector<double> prev;
  for (unsigned m = m0;; m *= 2) {
    // grid indices at this level; older levels are the all-even subset
    std::vector<std::vector<unsigned>> pts;
    std::vector<unsigned> idx(l, 0);
    while (true) {
      bool old = m != m0 && std::all_of(idx.begin(), idx.end(), [m](unsigned k) {
                   return k % 2 == 0 && k != 0 && k != m;
                 });
      if (!old) pts.push_back(idx);
      std::size_t a = 0;
      while (a < l && ++idx[a] > m) idx[a++] = 0;
      if (a == l) break;
    }
    std::vector<std::vector<double>> local(pts.size());
    parallel_for(pts.size(), [&](std::size_t p) {
      std::vector<Jet<double>> env;
      for (std::size_t a = 0; a < l; ++a)
        env.push_back(Jet<double>::variable(layout, a, clamp_coord(pts[p][a], m, policy.boundary_offset)));
      auto jets = eval_jets_in(components, env);
      std::vector<double> s(rep.betas.size(), 0.0);
      for (const auto& j : jets)
        for (std::size_t b = 0; b < s.size(); ++b) {
          double v = std::fabs(j[monomial_of[b]] * layout->factorial[monomial_of[b]]);
          if (!std::isfinite(v)) throw EvalError("non-finite derivative");
          s[b] = std::max(s[b], v);
        }
      local[p] = std::move(s);
    });
    for (const auto& s : local)
      for (std::size_t b = 0; b < s.size(); ++b) rep.sup[b] = std::max(rep.sup[b], s[b]);
    finish();
    rep.grid = m;
    rep.history.push_back({m, rep.norm});
    if (!prev.empty()) {
      bool settled = true;
      for (std::size_t b = 0; b < prev.size(); ++b)
        if (rep.sup[b] - prev[b] > policy.tolerance * std::max(1.0, prev[b])) settled = false;
      if (settled) {
        rep.converged = true;
        break;
      }
    }
    if (2 * m > mmax) break;
    prev = rep.sup;
  }
  return rep;
}

NormReport norm_estimate(const TriangularChart& chart, const MultiIndex& alpha,
                         const NormPolicy& policy) {
  return norm_estimate(chart.components, chart.source_dim, alpha, policy);
}

bool extends_continuously(std::span<const Expr> components, std::size_t l) {
  if (l == 0) return true;
  const double offs[] = {1e-4, 1e-6, 1e-8, 1e-10};
  // approach every face at a few interior positions and at the corners
  std::vector<double> along = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<std::vector<double>> dirs;
  for (std::size_t face = 0; face < l; ++face) {
    for (int side = 0; side < 2; ++side) {
      std::size_t others = l - 1;
      std::size_t combos = 1;
      for (std::size_t k = 0; k < others; ++k) combos *= along.size();
      for (std::size_t c = 0; c < combos; ++c) {
        std::vector<double> base(l, 0.0);
        std::size_t rest = c;
        for (std::size_t a = 0; a < l; ++a) {
          if (a == face) continue;
          base[a] = along[rest % along.size()];
          rest /= along.size();
        }
        base[face] = side;
        std::vector<double> prev;
        double last_gap = std::numeric_limits<double>::infinity();
        for (double o : offs) {
          std::vector<double> pt = base;
          for (auto& x : pt) x = std::clamp(x, o, 1.0 - o);
          std::vector<double> v;
          try {
            v = eval(components, pt);
          } catch (const std::exception&) {
            return false;
          }
          for (double x : v)
            if (!std::isfinite(x)) return false;
          if (!prev.empty()) {
            double gap = 0;
            for (std::size_t i = 0; i < v.size(); ++i) gap = std::max(gap, std::fabs(v[i] - prev[i]));
            last_gap = gap;
          }
          prev = v;
        }
        if (last_gap > 1e-3) return false;
      }
    }
  }
  return true;
}

unsigned rescale_factor(double K) {
  if (!std::isfinite(K)) throw ChartError("rescale: norm bound is not finite");
  if (K <= 1.0) return 1;
  double c = std::ceil(K * (1.0 - 1e-12));
  if (c > 1e6) throw ChartError("rescale: norm bound too large");
  return static_cast<unsigned>(c);
}

unsigned rescale_factor(const NormReport& report) {
  if (!report.converged) throw ChartError("rescale: norm estimate did not converge");
  return rescale_factor(report.derivative_norm);
}

std::vector<TriangularChart> affine_tiling(std::size_t l, unsigned pieces) {
  if (pieces == 0) throw ChartError("affine tiling needs at least one piece");
  std::vector<TriangularChart> out;
  std::vector<unsigned> idx(l, 0);
  while (true) {
    std::vector<Rational> lo, hi;
    for (std::size_t a = 0; a < l; ++a) {
      lo.push_back(Rational(idx[a]) / pieces);
      hi.push_back(Rational(idx[a] + 1) / pieces);
    }
    out.push_back(TriangularChart::affine_box(lo, hi));
    std::size_t a = 0;
    while (a < l && ++idx[a] == pieces) idx[a++] = 0;
    if (a == l) break;
  }
  return out;
}

Resolution rescale_to_unit(const Expr& f, std::size_t l, const NormReport& report,
                           const NormPolicy& policy) {
  unsigned pieces = rescale_factor(report);
  Resolution res;
  res.dim = l;
  res.alpha = report.alpha;
  res.domain_lo.assign(l, Rational(0));
  res.domain_hi.assign(l, Rational(1));
  res.functions = {f};
  for (auto& lam : affine_tiling(l, pieces)) {
    ChartRecord rec;
    Expr g = expr::compose(f, lam.components);
    rec.norm = norm_estimate(lam, report.alpha, policy);
    rec.composite_norms.push_back(norm_estimate(std::span<const Expr>(&g, 1), l, report.alpha, policy));
    rec.degree = lam.degree();
    rec.provenance = "rescale";
    rec.chart = std::move(lam);
    res.charts.push_back(std::move(rec));
  }
  return res;
}

unsigned Resolution::max_degree() const {
  unsigned d = 0;
  for (const auto& c : charts) d = std::max(d, c.degree);
  return d;
}

double Resolution::max_recorded_norm() const {
  double m = 0;
  for (const auto& c : charts) {
    if (c.norm) m = std::max(m, c.norm->norm);
    for (const auto& r : c.composite_norms) m = std::max(m, r.norm);
  }
  return m;
}

}  // namespace gromov
