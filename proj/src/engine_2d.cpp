#include <algorithm>
#include <cmath>

#include "engine_util.hpp"

namespace gromov {

namespace detail {

Rational inner_lo(const AlgebraicNumber& a) {
  if (a.is_rational()) return a.rational_value();
  return a.refined(Rational(1, mpz_class(1) << 60)).hi();
}

Rational inner_hi(const AlgebraicNumber& a) {
  if (a.is_rational()) return a.rational_value();
  return a.refined(Rational(1, mpz_class(1) << 60)).lo();
}

ChartRecord make_record(const TriangularChart& ch, const std::string& provenance,
                        const MultiIndex& alpha, const std::vector<Expr>& fns,
                        const EngineConfig& cfg) {
  ChartRecord rec;
  rec.chart = ch;
  rec.provenance = provenance;
  rec.degree = ch.degree();
  if (!cfg.record_norms) return rec;
  std::size_t l = ch.source_dim;
  MultiIndex a = alpha_for_dim(alpha, l);
  rec.norm = norm_estimate(ch.components, l, a, cfg.norm);
  for (const auto& f : fns) {
    Expr c = expr::compose(f, ch.components);
    rec.composite_norms.push_back(norm_estimate(std::span<const Expr>(&c, 1), l, a, cfg.norm));
  }
  if (l > 0) rec.extends_continuously = extends_continuously(ch.components, l);
  return rec;
}

std::vector<ChartRecord> finalize(const TriangularChart& ch, const std::string& provenance,
                                  const MultiIndex& alpha, const std::vector<Expr>& fns,
                                  const EngineConfig& cfg) {
  std::size_t l = ch.source_dim;
  if (l == 0) return {make_record(ch, provenance, alpha, fns, cfg)};
  MultiIndex a = alpha_for_dim(alpha, l);
  std::vector<Expr> comps = ch.components;
  for (const auto& f : fns) comps.push_back(expr::compose(f, ch.components));
  unsigned m = pieces_for(measure(comps, l, a, cfg).derivative_norm, cfg);
  std::vector<ChartRecord> out;
  for (int attempt = 0; attempt < 4; ++attempt) {
    out.clear();
    bool ok = true;
    std::size_t tiles = 1;
    for (std::size_t i = 0; i < l; ++i) tiles *= m;
    check_limit(tiles, cfg);
    for (const auto& mu : affine_tiling(l, m)) {
      TriangularChart sub = m > 1 ? compose(ch, mu) : ch;
      auto rec = make_record(sub, m > 1 ? "rescale" : provenance, alpha, fns, cfg);
      if (rec.norm) {
        ok = ok && rec.norm->derivative_norm <= 1.0 + 1e-7;
        for (const auto& c : rec.composite_norms) ok = ok && c.derivative_norm <= 1.0 + 1e-7;
      }
      out.push_back(std::move(rec));
    }
    if (ok) break;
    m += std::max(1U, m / 4);
  }
  return out;
}

}  // namespace detail

using namespace detail;

namespace {

bool is_const(const Expr& e) { return e->kind == NodeKind::Const; }

// the same one-variable expression read from variable `slot`
Expr at(const Expr& e, std::size_t slot) {
  if (is_const(e)) return e;
  if (slot == 0) return e;
  return expr::compose(e, {expr::var(slot)});
}

// resolves the non-constant members of a one-variable family; the result
// lists every member (constants unchanged) per piece
struct FamilyChart {
  Expr h;
  std::vector<Expr> members;
  std::string provenance;
};

std::vector<FamilyChart> resolve_members(const std::vector<Expr>& members, unsigned r,
                                         const EngineConfig& cfg) {
  std::vector<Expr> live;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < members.size(); ++i)
    if (!is_const(members[i])) {
      where.push_back(i);
      live.push_back(members[i]);
    }
  std::vector<FamilyChart> out;
  for (auto& p : resolve_family(live, r, cfg)) {
    FamilyChart fc{p.chart, members, p.provenance};
    for (std::size_t k = 0; k < where.size(); ++k) fc.members[where[k]] = p.comps[k];
    out.push_back(std::move(fc));
  }
  return out;
}

Expr poly2(const MultiPoly& f) { return expr::poly(f); }

MultiPoly diff(MultiPoly f, const MultiIndex& beta) {
  for (std::size_t v = 0; v < beta.size(); ++v)
    for (unsigned k = 0; k < beta[v]; ++k) f = f.derivative(v);
  return f;
}

double beta_sup(const NormReport& rep, const MultiIndex& beta) {
  for (std::size_t i = 0; i < rep.betas.size(); ++i)
    if (rep.betas[i] == beta) return rep.sup[i];
  return 0.0;
}

Resolution empty_resolution(std::size_t d, const MultiIndex& alpha, const Rational& lo,
                            const Rational& hi) {
  Resolution r;
  r.dim = d;
  r.alpha = alpha;
  r.domain_lo.assign(d, lo);
  r.domain_hi.assign(d, hi);
  return r;
}

}  // namespace

FirstDerivativeSplit split_by_first_derivative(const MultiPoly& f, unsigned n,
                                               const EngineConfig& /*cfg*/) {
  if (f.nvars() != 2) throw EngineError("first-derivative split needs a polynomial in x1, x2");
  if (n < 1) throw EngineError("shrink index must be at least 1");
  Rational lo = n > 1 ? Rational(1, n) : Rational(0);
  Rational hi = 1 - lo;
  MultiPoly fx = f.derivative(0);
  MultiPoly g = fx * fx - MultiPoly::constant(2, 1);
  std::vector<MultiPoly> polys;
  if (!g.is_constant()) polys.push_back(g);
  Decomposition dec = cad_plane(polys, lo, hi);
  int const_sign = g.is_constant() ? sgn(g.constant_term()) : 0;

  FirstDerivativeSplit out;
  out.minus = empty_resolution(2, MultiIndex{1, 0}, lo, hi);
  out.minus.shrink_n = n > 1 ? n : 0;
  Expr F = poly2(f);
  for (const auto& s : dec.slices) {
    int sign = polys.empty() ? const_sign : s.signs[0];
    const BaseCell& c = dec.cells[s.cell];
    if (!(sign > 0 && s.kind == SliceKind::Sector && !c.is_point())) {
      ChartRecord rec;
      rec.chart = slice_chart(dec, s);
      rec.provenance = "cell";
      rec.degree = rec.chart.degree();
      out.minus.charts.push_back(std::move(rec));
      continue;
    }
    Rational a = inner_lo(c.lo), b = inner_hi(c.hi);
    Expr L = level(dec, s.cell, s.lower, expr::var(0));
    Expr U = level(dec, s.cell, s.lower + 1, expr::var(0));
    // fiber over (z, t, u): f(blend(z, U(u), L(u)), u) - t
    Expr X = expr::blend(expr::var(0), at(U, 2), at(L, 2));
    Expr fx_at = expr::compose(F, {X, expr::var(2)});
    Expr fiber = expr::apply(MultiPoly::variable(2, 0) - MultiPoly::variable(2, 1),
                             {fx_at, expr::var(1)});
    Rational eps(1, 1000000000);
    Expr zeta = expr::branch(fiber, {expr::var(0), expr::var(1)}, -eps, 1 + eps);
    InverseJob job;
    job.f = F;
    job.phi = TriangularChart(2, {expr::blend(zeta, at(U, 1), at(L, 1)), expr::var(1)});
    Expr u = expr::affine(a, {Rational(0), b - a});
    auto over_u = [&](const Expr& e) { return is_const(e) ? e : expr::compose(e, {u}); };
    Expr FU = expr::compose(F, {over_u(U), u});
    Expr FL = expr::compose(F, {over_u(L), u});
    job.domain = TriangularChart(2, fold(std::vector<Expr>{expr::blend(expr::var(0), FU, FL), u}, 2));
    job.chart = compose(job.phi, job.domain);
    out.plus.push_back(std::move(job));
  }
  return out;
}

SquareStepResult square_substitution_step(const SliceJob& job, unsigned s,
                                          const EngineConfig& cfg) {
  SquareStepResult out;
  MultiIndex a2{0, s + 1};
  out.resolution = empty_resolution(2, a2, Rational(0), Rational(1));
  out.resolution.functions = {job.f};
  for (const auto& fc : resolve_members({job.zeta, job.eta}, s + 1, cfg)) {
    Expr Z = at(fc.members[0], 1), E = at(fc.members[1], 1);
    Expr H = at(fc.h, 1);
    TriangularChart psi(
        2, fold(std::vector<Expr>{expr::blend(expr::square(expr::var(0)), E, Z), H}, 2));
    Expr comp = expr::compose(job.f, psi.components);
    auto rep = measure(std::span<const Expr>(&comp, 1), 2, MultiIndex{s + 1, 0}, cfg);
    out.bound.push_back(beta_sup(rep, MultiIndex{s + 1, 0}));
    out.psi_norm.push_back(measure(psi.components, 2, a2, cfg).norm);
    for (auto& rec : finalize(psi, "square-subst", a2, {job.f}, cfg))
      out.resolution.charts.push_back(std::move(rec));
    out.charts.push_back(std::move(psi));
    check_limit(out.resolution.count(), cfg);
  }
  return out;
}

NextDerivativeResult next_derivative_step(const MultiPoly& f, const MultiIndex& alpha, unsigned n,
                                          const EngineConfig& cfg) {
  if (f.nvars() != 2 || alpha.size() != 2)
    throw EngineError("next-derivative step works on two variables");
  if (alpha[0] == 0) throw EngineError("next-derivative step needs alpha other than (0, s)");
  if (n < 3) throw EngineError("next-derivative step needs n >= 3");
  NextDerivativeResult out;
  out.next = mi_succ(alpha);
  Rational lo(1, n), hi = 1 - lo;
  out.b_n = 1 - ratio(2, n);
  MultiPoly D = diff(f, out.next);
  MultiPoly Dx = D.derivative(0);

  Expr ident = expr::var(0);
  out.candidates.push_back({ident, expr::constant(lo), "boundary"});
  out.candidates.push_back({ident, expr::constant(hi), "boundary"});
  if (Dx.degree_in(0) >= 1) {
    Decomposition dec = cad_plane({Dx}, lo, hi);
    for (const auto& s : dec.slices) {
      const BaseCell& c = dec.cells[s.cell];
      if (s.kind != SliceKind::Section || c.is_point() || s.signs[0] != 0) continue;
      Rational a = inner_lo(c.lo), b = inner_hi(c.hi);
      Expr yb = affine1(a, b - a);
      out.candidates.push_back({yb, level(dec, s.cell, s.lower, yb), "critical"});
    }
  }

  MultiPoly g = f;
  for (unsigned k = 0; k < out.next[0]; ++k) g = g.derivative(0);
  Rational bound(0);
  for (const auto& [e, c] : g.terms()) bound += abs_value(c);
  Expr G = expr::poly(g);
  Expr F = expr::poly(f);
  unsigned r = alpha.weight();
  Expr first = expr::affine(lo, {out.b_n});
  for (const auto& cand : out.candidates) {
    Expr gi = expr::compose(G, {cand.sigma, cand.base});
    // squash into (0,1) unless the values already sit there
    bool inside = true;
    for (int k = 1; k < 64 && inside; ++k) {
      std::vector<double> pt{k / 64.0};
      double v = eval(gi, pt);
      inside = v > 0 && v < 1;
    }
    if (!inside) {
      Rational sc = 1 / (2 * (1 + bound));
      gi = expr::compose(expr::affine(Rational(1, 2), {sc}), {gi});
    }
    for (const auto& fc : resolve_members({cand.base, cand.sigma, gi}, r, cfg)) {
      TriangularChart ch(2, fold(std::vector<Expr>{first, at(fc.members[0], 1)}, 2));
      bool dup = false;
      for (const auto& o : out.charts)
        dup = dup || (structurally_equal(o.components[0], ch.components[0]) &&
                      structurally_equal(o.components[1], ch.components[1]));
      if (!dup) out.charts.push_back(std::move(ch));
    }
    check_limit(out.charts.size(), cfg);
  }
  out.resolution = empty_resolution(2, out.next, Rational(0), Rational(1));
  out.resolution.functions = {F};
  for (const auto& ch : out.charts) {
    Expr comp = expr::compose(F, ch.components);
    auto rep = measure(std::span<const Expr>(&comp, 1), 2, out.next, cfg);
    out.bound.push_back(beta_sup(rep, out.next));
    for (auto& rec : finalize(ch, "argmax", out.next, {F}, cfg))
      out.resolution.charts.push_back(std::move(rec));
  }
  return out;
}

Resolution epsilon_resolution(const Presentation& target, const MultiIndex& alpha, unsigned n,
                              const std::vector<Expr>& functions, const EngineConfig& cfg) {
  std::size_t d = target.vars;
  if (d < 1 || d > 2) throw EngineError("epsilon resolution supports one or two variables");
  if (alpha.size() != d) throw EngineError("alpha length must equal the dimension");
  if (n < 1) throw EngineError("shrink index must be at least 1");
  for (const auto& f : functions)
    if (f->arity() > d) throw EngineError("function reads more variables than the target has");
  Presentation sh = n > 1 ? target.shrunk(n) : target;
  Decomposition dec = decompose(sh);
  unsigned r = alpha.weight();

  Resolution res = empty_resolution(d, alpha, sh.box_lo(), sh.box_hi());
  res.functions = functions;
  res.shrink_n = n > 1 ? n : 0;
  res.density = n > 1 ? std::sqrt(double(d)) / n : 0.0;
  res.coverage_tol = 1e-4;

  auto emit = [&](const TriangularChart& ch, const std::string& prov) {
    for (auto& rec : finalize(ch, prov, alpha, functions, cfg)) res.charts.push_back(std::move(rec));
    check_limit(res.count(), cfg);
  };

  for (const auto& s : slices_of(sh, dec)) {
    const BaseCell& c = dec.cells[s.cell];
    try {
      if (c.is_point()) {
        emit(slice_chart(dec, s), "cell");
        continue;
      }
      Rational a = inner_lo(c.lo), b = inner_hi(c.hi);
      Expr yb = affine1(a, b - a);
      if (d == 1) {
        for (const auto& fc : resolve_members({yb}, r, cfg))
          emit(TriangularChart(1, {fc.members[0]}), fc.provenance == "c1-split" ? "cell" : fc.provenance);
        continue;
      }
      Expr L = level(dec, s.cell, s.lower, yb);
      if (s.kind == SliceKind::Section) {
        for (const auto& fc : resolve_members({yb, L}, r, cfg))
          emit(TriangularChart(1, fold(std::vector<Expr>{fc.members[1], fc.members[0]}, 1)),
               "cell");
        continue;
      }
      Expr U = level(dec, s.cell, s.lower + 1, yb);
      for (const auto& fc : resolve_members({yb, L, U}, r, cfg)) {
        Expr x = expr::blend(expr::var(0), at(fc.members[2], 1), at(fc.members[1], 1));
        emit(TriangularChart(2, fold(std::vector<Expr>{x, at(fc.members[0], 1)}, 2)), "cell");
      }
    } catch (EngineError& e) {
      json diag = e.diagnostics();
      diag["slice"] = s.id;
      diag["cell"] = s.cell;
      diag["charts_so_far"] = res.count();
      diag["partial"] = to_json(res);
      throw EngineError(e.what(), diag);
    }
  }
  return res;
}

}  // namespace gromov
