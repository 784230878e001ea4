#include <algorithm>
#include <cmath>

#include "engine_util.hpp"
#include "gromov/algebraic.hpp"

namespace gromov {

namespace detail {

std::optional<UPoly> as_upoly(const Expr& h) {
  auto p = as_polynomial(h, 1);
  if (!p) return std::nullopt;
  if (p->is_zero()) return UPoly();
  return UPoly(p->dense_in(0));
}

Rational approx(const AlgebraicNumber& a) {
  if (a.is_rational()) return a.rational_value();
  AlgebraicNumber r = a.refined(Rational(1, mpz_class(1) << 90));
  if (r.is_rational()) return r.rational_value();
  return midpoint(r.lo(), r.hi());
}

double derivative_at(const Expr& h, double x, unsigned k) {
  std::vector<double> pt{x};
  auto j = eval_jets(std::span<const Expr>(&h, 1), pt, k);
  return j[0].derivative({k});
}

std::vector<double> crossings(const std::function<double(double)>& fn, double lo, double hi,
                              unsigned grid) {
  std::vector<double> xs, vs;
  for (unsigned i = 0; i <= grid; ++i) {
    double x = lo + (hi - lo) * i / grid;
    if (i == 0) x = lo + (hi - lo) * 1e-9;
    if (i == grid) x = hi - (hi - lo) * 1e-9;
    try {
      double v = fn(x);
      if (std::isfinite(v)) {
        xs.push_back(x);
        vs.push_back(v);
      }
    } catch (const std::exception&) {
    }
  }
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (vs[i] == 0) {
      if (i > 0) out.push_back(xs[i]);
      continue;
    }
    if (vs[i + 1] == 0 || (vs[i] < 0) == (vs[i + 1] < 0)) continue;
    double a = xs[i], b = xs[i + 1], fa = vs[i];
    for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
      double m = 0.5 * (a + b);
      double fm;
      try {
        fm = fn(m);
      } catch (const std::exception&) {
        break;
      }
      if (fm == 0) {
        a = b = m;
        break;
      }
      if ((fm < 0) == (fa < 0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

std::vector<Rational> derivative_roots(const Expr& h, unsigned k, unsigned grid) {
  std::vector<Rational> out;
  if (auto u = as_upoly(h)) {
    UPoly d = *u;
    for (unsigned i = 0; i < k; ++i) d = d.derivative();
    if (d.degree() < 1) return out;
    for (const auto& a : real_roots(d, {Rational(0), Rational(1)})) out.push_back(approx(a));
    return out;
  }
  for (double x : crossings([&](double x) { return derivative_at(h, x, k); }, 0.0, 1.0, grid))
    out.push_back(Rational(x));
  return out;
}

Expr affine1(const Rational& c, const Rational& slope) {
  if (c == 0 && slope == 1) return expr::var(0);
  return expr::affine(c, {slope});
}

NormReport measure(std::span<const Expr> comps, std::size_t l, const MultiIndex& alpha,
                   const EngineConfig& cfg) {
  NormReport rep;
  try {
    rep = norm_estimate(comps, l, alpha, cfg.norm);
  } catch (const EvalError& e) {
    throw EngineError(std::string("chart evaluation failed: ") + e.what());
  }
  if (!rep.converged) {
    json d;
    d["alpha"] = to_json(alpha);
    d["history"] = to_json(rep)["history"];
    throw EngineError("norm estimate did not converge", d);
  }
  return rep;
}

NormReport measure(const Expr& e, unsigned r, const EngineConfig& cfg) {
  return measure(std::span<const Expr>(&e, 1), 1, MultiIndex{r}, cfg);
}

unsigned pieces_for(double K, const EngineConfig& cfg) {
  if (K <= 1.0) return 1;
  return rescale_factor(K * (1.0 + cfg.rescale_margin));
}

FamilyPiece compose_piece(const FamilyPiece& p, const Expr& inner, const std::string& provenance) {
  FamilyPiece q;
  q.chart = expr::compose(p.chart, {inner});
  for (const auto& c : p.comps) q.comps.push_back(expr::compose(c, {inner}));
  q.provenance = provenance;
  return q;
}

}  // namespace detail

using namespace detail;

Expr MonotonePiece::oriented() const {
  Expr lam = flipped ? affine1(d, c - d) : affine1(c, d - c);
  return expr::compose(h, {lam});
}

namespace {

// splits [0,1] at the given points and merges neighbours of equal class
std::vector<std::pair<Rational, Rational>> merged_pieces(std::vector<Rational> cuts,
                                                         const std::function<int(const Rational&)>& cls,
                                                         std::vector<int>& classes) {
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Rational> pts{Rational(0)};
  for (const auto& c : cuts)
    if (c > pts.back() && c < 1) pts.push_back(c);
  pts.push_back(Rational(1));
  std::vector<std::pair<Rational, Rational>> out;
  classes.clear();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    int k = cls(midpoint(pts[i], pts[i + 1]));
    if (!out.empty() && classes.back() == k) {
      out.back().second = pts[i + 1];
    } else {
      out.push_back({pts[i], pts[i + 1]});
      classes.push_back(k);
    }
  }
  return out;
}

double value_near(const Expr& f, const Rational& x, const Rational& toward) {
  std::vector<double> pt{x.get_d()};
  try {
    double v = eval(f, pt);
    if (std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  pt[0] = Rational(x + (toward - x) * Rational(1, 1000000000)).get_d();
  return eval(f, pt);
}

}  // namespace

void detail::check_limit(std::size_t n, const EngineConfig& cfg) {
  if (n > cfg.max_charts) {
    json d;
    d["charts"] = n;
    d["limit"] = cfg.max_charts;
    throw EngineError("chart count exceeded the configured limit", d);
  }
}

std::vector<FamilyPiece> c1_pieces(const Expr& f, const EngineConfig& cfg, EngineTrace* trace) {
  auto up = as_upoly(f);
  std::vector<Rational> cuts;
  std::function<int(const Rational&)> cls;
  if (up) {
    UPoly fp = up->derivative();
    UPoly g = fp * fp - UPoly({Rational(1)});
    if (!g.is_zero() && g.degree() >= 1)
      for (const auto& a : real_roots(g, {Rational(0), Rational(1)})) cuts.push_back(approx(a));
    cls = [g](const Rational& x) { return g.is_zero() ? 0 : (g.evaluate(x) > 0 ? 1 : 0); };
  } else {
    auto fn = [&](double x) {
      double d = derivative_at(f, x, 1);
      return d * d - 1.0;
    };
    for (double x : crossings(fn, 0.0, 1.0, cfg.root_grid)) cuts.push_back(Rational(x));
    cls = [fn](const Rational& x) { return fn(x.get_d()) > 0 ? 1 : 0; };
  }
  std::vector<int> classes;
  auto pieces = merged_pieces(cuts, cls, classes);
  std::vector<FamilyPiece> out;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& [c, d] = pieces[i];
    FamilyPiece p;
    if (classes[i] == 0) {
      p.chart = affine1(c, d - c);
      p.comps = {expr::compose(f, {p.chart})};
      p.provenance = "c1-split";
    } else {
      Rational v0, v1;
      if (up) {
        v0 = up->evaluate(c);
        v1 = up->evaluate(d);
      } else {
        v0 = Rational(value_near(f, c, d));
        v1 = Rational(value_near(f, d, c));
      }
      Rational eps = (d - c) / 1000000000;
      Expr v = affine1(v0, v1 - v0);
      if (up) {
        MultiPoly fiber = up->to_multi(2, 0) - MultiPoly::variable(2, 1);
        p.chart = expr::branch(fiber, {v}, c - eps, d + eps, 1);
      } else {
        Expr fiber = expr::apply(MultiPoly::variable(2, 0) - MultiPoly::variable(2, 1),
                                 {f, expr::var(1)});
        p.chart = expr::branch(fiber, {v}, c - eps, d + eps);
      }
      p.comps = {v};
      p.provenance = "inverse";
      if (trace) trace->inverses.push_back({f, p.chart, v0, v1});
    }
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

// order-r step for one map h with ||h||_{r-1} <= 1
std::vector<FamilyPiece> single_step(const Expr& h, unsigned r, const EngineConfig& cfg,
                                     EngineTrace* trace) {
  auto rep = measure(h, r, cfg);
  if (rep.derivative_norm <= 1.0) return {FamilyPiece{expr::var(0), {h}, "c1-split"}};

  std::vector<Rational> cuts = derivative_roots(h, r, cfg.root_grid);
  for (const auto& x : derivative_roots(h, r + 1, cfg.root_grid)) cuts.push_back(x);
  auto up = as_upoly(h);
  std::function<int(const Rational&)> cls = [&](const Rational& x) {
    if (up) {
      UPoly a = *up;
      for (unsigned i = 0; i < r; ++i) a = a.derivative();
      return sgn(a.evaluate(x) * a.derivative().evaluate(x));
    }
    std::vector<double> pt{x.get_d()};
    auto j = eval_jets(std::span<const Expr>(&h, 1), pt, r + 1);
    double p = j[0].derivative({r}) * j[0].derivative({r + 1});
    return p > 0 ? 1 : (p < 0 ? -1 : 0);
  };
  std::vector<int> classes;
  auto pieces = merged_pieces(cuts, cls, classes);
  std::vector<FamilyPiece> out;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    MonotonePiece mp{h, pieces[i].first, pieces[i].second, classes[i] > 0, r};
    if (trace) trace->pieces.push_back(mp);
    Expr lam = mp.flipped ? affine1(mp.d, mp.c - mp.d) : affine1(mp.c, mp.d - mp.c);
    Expr chi = expr::compose(lam, {expr::square(expr::var(0))});
    Expr hchi = expr::compose(h, {chi});
    std::vector<Expr> both{chi, hchi};
    auto k = measure(both, 1, MultiIndex{r}, cfg);
    unsigned n = pieces_for(k.derivative_norm, cfg);
    for (const auto& mu : affine_tiling(1, n)) {
      FamilyPiece q;
      q.chart = expr::compose(chi, mu.components);
      q.comps = {expr::compose(hchi, mu.components)};
      q.provenance = n > 1 ? "rescale" : "square-subst";
      out.push_back(std::move(q));
    }
  }
  return out;
}

// charts psi with ||psi||_r <= 1 and ||g o psi||_r <= 1 for every g, given ||g||_{r-1} <= 1
std::vector<FamilyPiece> step_family(const std::vector<Expr>& gs, unsigned r,
                                     const EngineConfig& cfg, EngineTrace* trace) {
  std::vector<FamilyPiece> pieces{FamilyPiece{expr::var(0), gs, "c1-split"}};
  for (std::size_t j = 0; j < gs.size(); ++j) {
    std::vector<FamilyPiece> next;
    for (const auto& p : pieces) {
      // restore ||g_j o psi||_{r-1} <= 1 first
      auto k = measure(p.comps[j], r - 1 == 0 ? 1 : r - 1, cfg);
      unsigned n = r - 1 == 0 ? 1 : pieces_for(k.derivative_norm, cfg);
      for (const auto& mu : affine_tiling(1, n)) {
        FamilyPiece pm = n > 1 ? compose_piece(p, mu.components[0], "rescale") : p;
        for (const auto& w : single_step(pm.comps[j], r, cfg, trace)) {
          FamilyPiece q = compose_piece(pm, w.chart, w.provenance);
          q.comps[j] = w.comps[0];
          // earlier maps and the chart itself are bounded by composition; rescale
          std::vector<Expr> watch{q.chart};
          for (std::size_t i = 0; i <= j; ++i) watch.push_back(q.comps[i]);
          auto kk = measure(watch, 1, MultiIndex{r}, cfg);
          unsigned m = pieces_for(kk.derivative_norm, cfg);
          for (const auto& nu : affine_tiling(1, m))
            next.push_back(m > 1 ? compose_piece(q, nu.components[0], "rescale") : q);
          check_limit(next.size(), cfg);
        }
      }
    }
    pieces = std::move(next);
  }
  return pieces;
}

}  // namespace

std::vector<FamilyPiece> resolve_family(const std::vector<Expr>& fs, unsigned r,
                                        const EngineConfig& cfg, EngineTrace* trace) {
  if (r == 0) return {FamilyPiece{expr::var(0), fs, "c1-split"}};
  if (r == 1) {
    std::vector<FamilyPiece> pieces{FamilyPiece{expr::var(0), fs, "c1-split"}};
    for (std::size_t j = 0; j < fs.size(); ++j) {
      std::vector<FamilyPiece> next;
      for (const auto& p : pieces) {
        for (const auto& q : c1_pieces(p.comps[j], cfg, trace)) {
          FamilyPiece c = compose_piece(p, q.chart, q.provenance);
          c.comps[j] = q.comps[0];
          next.push_back(std::move(c));
        }
        check_limit(next.size(), cfg);
      }
      pieces = std::move(next);
    }
    return pieces;
  }
  auto prev = resolve_family(fs, r - 1, cfg, trace);
  std::vector<FamilyPiece> out;
  for (const auto& p : prev) {
    std::vector<Expr> gs{p.chart};
    gs.insert(gs.end(), p.comps.begin(), p.comps.end());
    for (const auto& q : step_family(gs, r, cfg, trace)) {
      FamilyPiece c;
      c.chart = q.comps[0];
      c.comps.assign(q.comps.begin() + 1, q.comps.end());
      c.provenance = q.provenance;
      out.push_back(std::move(c));
    }
    check_limit(out.size(), cfg);
  }
  return out;
}

Resolution resolve_interval_cr(const Expr& f, const Rational& a, const Rational& b, unsigned r,
                               const EngineConfig& cfg, EngineTrace* trace) {
  if (!(a >= 0 && a < b && b <= 1)) throw EngineError("interval must satisfy 0 <= a < b <= 1");
  if (r == 0) throw EngineError("order must be at least 1");
  if (f->arity() > 1) throw EngineError("dimension-1 input must use only x1");
  Expr iota = affine1(a, b - a);
  Expr F = expr::compose(f, {iota});
  auto pieces = resolve_family({F}, r, cfg, trace);
  Resolution res;
  res.dim = 1;
  res.alpha = MultiIndex{r};
  res.domain_lo = {a};
  res.domain_hi = {b};
  res.functions = {f};
  for (const auto& p : pieces) {
    ChartRecord rec;
    rec.chart = TriangularChart(1, {expr::compose(iota, {p.chart})});
    rec.provenance = p.provenance;
    rec.degree = rec.chart.degree();
    if (cfg.record_norms) {
      rec.norm = norm_estimate(rec.chart, res.alpha, cfg.norm);
      rec.composite_norms.push_back(
          norm_estimate(std::span<const Expr>(&p.comps[0], 1), 1, res.alpha, cfg.norm));
      rec.extends_continuously = extends_continuously(rec.chart.components, 1);
    }
    res.charts.push_back(std::move(rec));
  }
  return res;
}

Resolution resolve_interval_c1(const Expr& f, const Rational& a, const Rational& b,
                               const EngineConfig& cfg, EngineTrace* trace) {
  return resolve_interval_cr(f, a, b, 1, cfg, trace);
}

}  // namespace gromov
