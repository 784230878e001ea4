#include "gromov/chart_expr.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "gromov/upoly.hpp"

namespace gromov {

std::string node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Var: return "var";
    case NodeKind::Const: return "const";
    case NodeKind::Affine: return "affine";
    case NodeKind::Poly: return "poly";
    case NodeKind::Square: return "square";
    case NodeKind::Branch: return "branch";
    case NodeKind::Blend: return "blend";
    case NodeKind::Compose: return "compose";
  }
  return "?";
}

std::size_t ChartNode::arity() const {
  return support == 0 ? 0 : 64 - static_cast<std::size_t>(std::countl_zero(support));
}

namespace {

std::uint64_t bit(std::size_t i) {
  if (i >= 64) throw ChartError("more than 64 chart variables");
  return std::uint64_t{1} << i;
}

unsigned max_degree(const std::vector<Expr>& es) {
  unsigned d = 1;
  for (const auto& e : es) d = std::max(d, e->degree);
  return d;
}

Expr make(ChartNode n) { return std::make_shared<const ChartNode>(std::move(n)); }

Expr from_polynomial(const MultiPoly& p) {
  if (p.total_degree() == 0) return expr::constant(p.constant_term());
  if (p.total_degree() == 1) {
    std::vector<Rational> coefs(p.nvars(), Rational(0));
    for (const auto& [e, c] : p.terms())
      for (std::size_t i = 0; i < e.size(); ++i)
        if (e[i] == 1) coefs[i] = c;
    Rational off = p.constant_term();
    std::size_t nz = 0, last = 0;
    for (std::size_t i = 0; i < coefs.size(); ++i)
      if (coefs[i] != 0) ++nz, last = i;
    if (off == 0 && nz == 1 && coefs[last] == 1) return expr::var(last);
    coefs.resize(last + 1);
    return expr::affine(off, std::move(coefs));
  }
  return expr::poly(p);
}

constexpr unsigned kFoldDegreeCap = 64;

}  // namespace

namespace expr {

Expr var(std::size_t i) {
  ChartNode n;
  n.kind = NodeKind::Var;
  n.index = i;
  n.support = bit(i);
  return make(std::move(n));
}

Expr constant(const Rational& c) { return constant(AlgebraicNumber(c)); }

Expr constant(const AlgebraicNumber& c) {
  ChartNode n;
  n.kind = NodeKind::Const;
  n.constant = c;
  n.approx = c.to_double();
  n.degree = c.is_rational() ? 1 : static_cast<unsigned>(c.poly().degree());
  return make(std::move(n));
}

Expr affine(const Rational& offset, std::vector<Rational> coefs) {
  ChartNode n;
  n.kind = NodeKind::Affine;
  n.offset = offset;
  for (std::size_t i = 0; i < coefs.size(); ++i)
    if (coefs[i] != 0) n.support |= bit(i);
  n.coefs = std::move(coefs);
  return make(std::move(n));
}

Expr poly(const MultiPoly& p) {
  ChartNode n;
  n.kind = NodeKind::Poly;
  n.poly = p;
  for (auto v : p.used_variables()) n.support |= bit(v);
  n.degree = std::max(1U, p.total_degree());
  return make(std::move(n));
}

Expr square(Expr e) {
  ChartNode n;
  n.kind = NodeKind::Square;
  n.support = e->support;
  n.degree = 2 * e->degree;
  n.args = {std::move(e)};
  return make(std::move(n));
}

Expr branch(const MultiPoly& fiber, std::vector<Expr> params, const Rational& lo,
            const Rational& hi, unsigned k) {
  if (fiber.nvars() != params.size() + 1)
    throw ChartError("branch fiber needs one variable per parameter plus the root");
  if (!(lo < hi)) throw ChartError("branch window is empty");
  if (k == 0) throw ChartError("branch root index is 1-based");
  ChartNode n;
  n.kind = NodeKind::Branch;
  n.poly = fiber;
  n.window_lo = lo;
  n.window_hi = hi;
  n.root_index = k;
  for (const auto& p : params) n.support |= p->support;
  n.degree = std::max(1U, fiber.total_degree()) * max_degree(params);
  n.args = std::move(params);
  return make(std::move(n));
}

Expr branch(Expr fiber, std::vector<Expr> params, const Rational& lo, const Rational& hi) {
  if (!(lo < hi)) throw ChartError("branch window is empty");
  if (fiber->arity() > params.size() + 1) throw ChartError("branch fiber uses too many variables");
  ChartNode n;
  n.kind = NodeKind::Branch;
  n.window_lo = lo;
  n.window_hi = hi;
  n.root_index = 1;
  for (const auto& p : params) n.support |= p->support;
  n.degree = fiber->degree * max_degree(params);
  n.fiber = std::move(fiber);
  n.args = std::move(params);
  return make(std::move(n));
}

Expr blend(Expr t, Expr u, Expr v) {
  ChartNode n;
  n.kind = NodeKind::Blend;
  n.support = t->support | u->support | v->support;
  n.degree = t->degree + std::max(u->degree, v->degree);
  n.args = {std::move(t), std::move(u), std::move(v)};
  return make(std::move(n));
}

namespace {
using ComposeCache = std::unordered_map<const ChartNode*, Expr>;
Expr compose_cached(const Expr& outer, const std::vector<Expr>& args, ComposeCache& cache);
}  // namespace

Expr compose(Expr outer, std::vector<Expr> args) {
  ComposeCache cache;
  return compose_cached(outer, args, cache);
}

Expr compose_node(Expr outer, std::vector<Expr> args) {
  if (outer->arity() > args.size()) throw ChartError("compose: too few inner expressions");
  ChartNode node;
  node.kind = NodeKind::Compose;
  for (std::size_t j = 0; j < args.size(); ++j)
    if (outer->support & bit(j)) node.support |= args[j]->support;
  node.degree = outer->degree * max_degree(args);
  node.outer = std::move(outer);
  node.args = std::move(args);
  return make(std::move(node));
}

namespace {

Expr compose_uncached(const Expr& outer, const std::vector<Expr>& args, ComposeCache& cache) {
  using namespace expr;
  if (outer->arity() > args.size()) throw ChartError("compose: too few inner expressions");
  if (outer->kind == NodeKind::Var) return args[outer->index];
  if (outer->support == 0) return outer;
  bool identity = true;
  for (std::size_t i = 0; i < args.size() && identity; ++i)
    identity = args[i]->kind == NodeKind::Var && args[i]->index == i;
  if (identity) return outer;

  std::size_t n = 0;
  for (const auto& a : args) n = std::max(n, a->arity());
  if (n > 0) {
    if (auto po = as_polynomial(outer, args.size())) {
      std::vector<MultiPoly> vals;
      bool ok = true;
      for (const auto& a : args) {
        auto pa = as_polynomial(a, n);
        if (!pa) {
          ok = false;
          break;
        }
        vals.push_back(*pa);
      }
      if (ok) {
        unsigned bound = 0;
        for (const auto& [e, c] : po->terms()) {
          unsigned s = 0;
          for (std::size_t i = 0; i < e.size(); ++i) s += e[i] * vals[i].total_degree();
          bound = std::max(bound, s);
        }
        if (bound <= kFoldDegreeCap) return from_polynomial(po->compose(vals));
      }
    }
  }

  // push through nodes whose children live in the same environment
  switch (outer->kind) {
    case NodeKind::Square: return square(compose_cached(outer->args[0], args, cache));
    case NodeKind::Blend:
      return blend(compose_cached(outer->args[0], args, cache),
                   compose_cached(outer->args[1], args, cache),
                   compose_cached(outer->args[2], args, cache));
    case NodeKind::Branch: {
      std::vector<Expr> ps;
      for (const auto& p : outer->args) ps.push_back(compose_cached(p, args, cache));
      if (outer->fiber) return branch(outer->fiber, ps, outer->window_lo, outer->window_hi);
      return branch(outer->poly, ps, outer->window_lo, outer->window_hi, outer->root_index);
    }
    default: break;
  }
  return compose_node(outer, args);
}

Expr compose_cached(const Expr& outer, const std::vector<Expr>& args, ComposeCache& cache) {
  auto it = cache.find(outer.get());
  if (it != cache.end()) return it->second;
  Expr r = compose_uncached(outer, args, cache);
  cache.emplace(outer.get(), r);
  return r;
}

}  // namespace

Expr apply(const MultiPoly& p, std::vector<Expr> args) {
  return compose(from_polynomial(p), std::move(args));
}

}  // namespace expr

std::optional<MultiPoly> as_polynomial(const Expr& e, std::size_t nvars) {
  if (e->arity() > nvars) return std::nullopt;
  switch (e->kind) {
    case NodeKind::Var: return MultiPoly::variable(nvars, e->index);
    case NodeKind::Const:
      if (!e->constant.is_rational()) return std::nullopt;
      return MultiPoly::constant(nvars, e->constant.rational_value());
    case NodeKind::Affine: {
      MultiPoly p = MultiPoly::constant(nvars, e->offset);
      for (std::size_t i = 0; i < e->coefs.size(); ++i)
        if (e->coefs[i] != 0) p += e->coefs[i] * MultiPoly::variable(nvars, i);
      return p;
    }
    case NodeKind::Poly: {
      std::vector<std::size_t> map(e->poly.nvars());
      for (std::size_t i = 0; i < map.size(); ++i) map[i] = i;
      if (e->poly.nvars() > nvars) {
        // trailing unused variables
        MultiPoly q(nvars);
        for (const auto& [ex, c] : e->poly.terms()) {
          Exponents d(ex.begin(), ex.begin() + static_cast<long>(nvars));
          q.add_term(d, c);
        }
        return q;
      }
      return e->poly.remap(nvars, map);
    }
    case NodeKind::Square: {
      auto p = as_polynomial(e->args[0], nvars);
      if (!p || 2 * p->total_degree() > kFoldDegreeCap) return std::nullopt;
      return *p * *p;
    }
    case NodeKind::Blend: {
      auto t = as_polynomial(e->args[0], nvars);
      auto u = as_polynomial(e->args[1], nvars);
      auto v = as_polynomial(e->args[2], nvars);
      if (!t || !u || !v) return std::nullopt;
      return *v + *t * (*u - *v);
    }
    case NodeKind::Compose: {
      auto po = as_polynomial(e->outer, e->args.size());
      if (!po) return std::nullopt;
      std::vector<MultiPoly> vals;
      for (const auto& a : e->args) {
        auto pa = as_polynomial(a, nvars);
        if (!pa) return std::nullopt;
        vals.push_back(*pa);
      }
      return po->compose(vals);
    }
    case NodeKind::Branch: return std::nullopt;
  }
  return std::nullopt;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  auto same_list = [](const std::vector<Expr>& x, const std::vector<Expr>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!structurally_equal(x[i], y[i])) return false;
    return true;
  };
  switch (a->kind) {
    case NodeKind::Var: return a->index == b->index;
    case NodeKind::Const: return compare(a->constant, b->constant) == 0;
    case NodeKind::Affine: {
      auto ca = a->coefs, cb = b->coefs;
      std::size_t m = std::max(ca.size(), cb.size());
      ca.resize(m, 0);
      cb.resize(m, 0);
      return a->offset == b->offset && ca == cb;
    }
    case NodeKind::Poly: return a->poly == b->poly;
    case NodeKind::Square:
    case NodeKind::Blend: return same_list(a->args, b->args);
    case NodeKind::Branch:
      if ((a->fiber == nullptr) != (b->fiber == nullptr)) return false;
      if (a->fiber ? !structurally_equal(a->fiber, b->fiber) : !(a->poly == b->poly)) return false;
      return a->window_lo == b->window_lo && a->window_hi == b->window_hi &&
             a->root_index == b->root_index && same_list(a->args, b->args);
    case NodeKind::Compose:
      return structurally_equal(a->outer, b->outer) && same_list(a->args, b->args);
  }
  return false;
}

namespace {

template <class T>
class Evaluator {
 public:
  using Memo = std::unordered_map<const ChartNode*, Jet<T>>;

  explicit Evaluator(std::shared_ptr<const JetLayout> layout) : layout_(std::move(layout)) {}

  Jet<T> run(const Expr& e, std::span<const Jet<T>> env, Memo& memo) {
    auto it = memo.find(e.get());
    if (it != memo.end()) return it->second;
    Jet<T> r = compute(*e, env, memo);
    memo.emplace(e.get(), r);
    return r;
  }

 private:
  Jet<T> constant(const T& v) const { return Jet<T>::constant(layout_, v); }

  Jet<T> compute(const ChartNode& n, std::span<const Jet<T>> env, Memo& memo) {
    switch (n.kind) {
      case NodeKind::Var:
        if (n.index >= env.size()) throw ChartError("variable outside the environment");
        return env[n.index];
      case NodeKind::Const:
        if constexpr (std::is_same_v<T, double>) {
          return constant(n.approx);
        } else {
          if (!n.constant.is_rational()) throw NotExactError("irrational constant");
          return constant(n.constant.rational_value());
        }
      case NodeKind::Affine: {
        Jet<T> r = constant(scalar_from<T>(n.offset));
        for (std::size_t i = 0; i < n.coefs.size(); ++i) {
          if (n.coefs[i] == 0) continue;
          if (i >= env.size()) throw ChartError("variable outside the environment");
          r += env[i] * scalar_from<T>(n.coefs[i]);
        }
        return r;
      }
      case NodeKind::Poly:
        if (env.size() < n.poly.nvars()) throw ChartError("polynomial needs more variables");
        return eval_poly<T>(n.poly, env, layout_);
      case NodeKind::Square: {
        Jet<T> a = run(n.args[0], env, memo);
        return a * a;
      }
      case NodeKind::Blend: {
        Jet<T> t = run(n.args[0], env, memo);
        Jet<T> u = run(n.args[1], env, memo);
        Jet<T> v = run(n.args[2], env, memo);
        return v + t * (u - v);
      }
      case NodeKind::Compose: {
        std::vector<Jet<T>> inner;
        inner.reserve(n.args.size());
        for (const auto& a : n.args) inner.push_back(run(a, env, memo));
        Memo sub;
        return run(n.outer, inner, sub);
      }
      case NodeKind::Branch: return branch(n, env, memo);
    }
    throw ChartError("unknown node kind");
  }

  Jet<T> branch(const ChartNode& n, std::span<const Jet<T>> env, Memo& memo) {
    std::vector<Jet<T>> params;
    params.reserve(n.args.size());
    for (const auto& a : n.args) params.push_back(run(a, env, memo));
    if (n.fiber) {
      if constexpr (std::is_same_v<T, double>) {
        return expr_branch(n, params);
      } else {
        throw NotExactError("expression fiber has no exact path");
      }
    }
    T z0, dfdz;
    if constexpr (std::is_same_v<T, double>) {
      std::vector<double> coeffs(n.poly.degree_in(0) + 1, 0.0);
      for (const auto& [e, c] : n.poly.terms()) {
        double term = c.get_d();
        for (std::size_t j = 1; j < e.size(); ++j)
          if (e[j]) term *= std::pow(params[j - 1].value(), static_cast<int>(e[j]));
        coeffs[e[0]] += term;
      }
      double wlo = n.window_lo.get_d(), whi = n.window_hi.get_d();
      auto roots = numeric_roots(coeffs, wlo, whi);
      if (roots.size() < n.root_index) {
        // a root may round onto the window edge; retry slightly wider
        double slack = 1e-9 * (whi - wlo);
        roots = numeric_roots(coeffs, wlo - slack, whi + slack);
        for (auto& r : roots) r = std::clamp(r, wlo, whi);
      }
      if (roots.size() < n.root_index) throw EvalError("branch root missing at this point");
      z0 = roots[n.root_index - 1];
      dfdz = 0.0;
      for (std::size_t k = coeffs.size(); k-- > 1;) dfdz = dfdz * z0 + coeffs[k] * double(k);
    } else {
      std::vector<Rational> coeffs(n.poly.degree_in(0) + 1, Rational(0));
      for (const auto& [e, c] : n.poly.terms()) {
        Rational term = c;
        for (std::size_t j = 1; j < e.size(); ++j)
          if (e[j]) term *= power(params[j - 1].value(), e[j]);
        coeffs[e[0]] += term;
      }
      UPoly u(coeffs);
      if (u.is_zero()) throw EvalError("branch fiber vanishes identically");
      auto roots = real_roots(u, {n.window_lo, n.window_hi});
      if (roots.size() < n.root_index) throw EvalError("branch root missing at this point");
      const auto& r = roots[n.root_index - 1];
      if (!r.is_rational()) throw NotExactError("irrational branch value");
      z0 = r.rational_value();
      dfdz = u.derivative().evaluate(z0);
    }
    if (dfdz == 0) throw EvalError("singular branch point");
    return implicit_jet<T>(layout_, z0, dfdz, [&](const Jet<T>& z) {
      std::vector<Jet<T>> args{z};
      args.insert(args.end(), params.begin(), params.end());
      return eval_poly<T>(n.poly, args, layout_);
    });
  }

  // unique root of a monotone expression fiber: bracketed Newton
  Jet<T> expr_branch(const ChartNode& n, const std::vector<Jet<T>>& params) {
    auto L1 = JetLayout::get(1, 1);
    auto value_at = [&](double z, double* slope) {
      std::vector<Jet<double>> env{Jet<double>::variable(L1, 0, z)};
      for (const auto& p : params) env.push_back(Jet<double>::constant(L1, p.value()));
      Evaluator<double> ev(L1);
      typename Evaluator<double>::Memo m;
      auto j = ev.run(n.fiber, env, m);
      if (slope) *slope = j[1];
      return j.value();
    };
    double a = n.window_lo.get_d(), b = n.window_hi.get_d();
    auto safe = [&](double& z, double toward) {
      for (int k = 0; k < 40; ++k) {
        try {
          double v = value_at(z, nullptr);
          if (std::isfinite(v)) return v;
        } catch (const std::exception&) {
        }
        z += (toward - z) * 1e-9 * std::pow(10.0, k / 4);
      }
      throw EvalError("branch fiber not evaluable near the window end");
    };
    double fa = safe(a, b), fb = safe(b, a);
    if (fa == 0) return finish_expr_branch(n, params, a);
    if (fb == 0) return finish_expr_branch(n, params, b);
    if ((fa < 0) == (fb < 0)) throw EvalError("branch fiber has no sign change on the window");
    double z = a - fa * (b - a) / (fb - fa);
    for (int it = 0; it < 200; ++it) {
      if (!(z > a && z < b)) z = 0.5 * (a + b);
      double slope = 0;
      double fz = value_at(z, &slope);
      if (fz == 0) break;
      if ((fz < 0) == (fa < 0)) {
        a = z;
        fa = fz;
      } else {
        b = z;
      }
      if (b - a <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(z))) {
        z = 0.5 * (a + b);
        break;
      }
      double next = slope != 0 && std::isfinite(slope) ? z - fz / slope : 0.5 * (a + b);
      // fall back to bisection when Newton leaves the bracket or stalls
      if (!(next > a && next < b) || std::fabs(next - z) > 0.5 * (b - a)) next = 0.5 * (a + b);
      if (next == z) break;
      z = next;
    }
    return finish_expr_branch(n, params, z);
  }

  Jet<T> finish_expr_branch(const ChartNode& n, const std::vector<Jet<T>>& params, double z0) {
    auto L1 = JetLayout::get(1, 1);
    std::vector<Jet<double>> env{Jet<double>::variable(L1, 0, z0)};
    for (const auto& p : params) env.push_back(Jet<double>::constant(L1, p.value()));
    Evaluator<double> ev(L1);
    typename Evaluator<double>::Memo m;
    double dfdz = ev.run(n.fiber, env, m)[1];
    if (dfdz == 0 || !std::isfinite(dfdz)) throw EvalError("singular branch point");
    return implicit_jet<T>(layout_, z0, dfdz, [&](const Jet<T>& z) {
      std::vector<Jet<T>> args{z};
      args.insert(args.end(), params.begin(), params.end());
      Evaluator<T> sub(layout_);
      Memo mm;
      return sub.run(n.fiber, args, mm);
    });
  }

  std::shared_ptr<const JetLayout> layout_;
};

}  // namespace

std::vector<Jet<double>> eval_jets(std::span<const Expr> es, std::span<const double> point,
                                   unsigned order) {
  auto L = JetLayout::get(point.size(), order);
  std::vector<Jet<double>> env;
  for (std::size_t i = 0; i < point.size(); ++i) env.push_back(Jet<double>::variable(L, i, point[i]));
  return eval_jets_in(es, env);
}

std::vector<Jet<double>> eval_jets_in(std::span<const Expr> es, std::span<const Jet<double>> env) {
  auto L = env.empty() ? JetLayout::get(0, 0) : env[0].layout();
  Evaluator<double> ev(L);
  Evaluator<double>::Memo memo;
  std::vector<Jet<double>> out;
  for (const auto& e : es) out.push_back(ev.run(e, env, memo));
  return out;
}

std::vector<Jet<Rational>> eval_jets_exact(std::span<const Expr> es,
                                           std::span<const Rational> point, unsigned order) {
  auto L = JetLayout::get(point.size(), order);
  std::vector<Jet<Rational>> env;
  for (std::size_t i = 0; i < point.size(); ++i)
    env.push_back(Jet<Rational>::variable(L, i, point[i]));
  Evaluator<Rational> ev(L);
  Evaluator<Rational>::Memo memo;
  std::vector<Jet<Rational>> out;
  for (const auto& e : es) out.push_back(ev.run(e, env, memo));
  return out;
}

double eval(const Expr& e, std::span<const double> point) {
  return eval(std::span<const Expr>(&e, 1), point)[0];
}

std::vector<double> eval(std::span<const Expr> es, std::span<const double> point) {
  auto L = JetLayout::get(point.size(), 0);
  std::vector<Jet<double>> env;
  for (double x : point) env.push_back(Jet<double>::constant(L, x));
  std::vector<double> out;
  for (const auto& j : eval_jets_in(es, env)) out.push_back(j.value());
  return out;
}

}  // namespace gromov
