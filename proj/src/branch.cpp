#include <algorithm>
#include <cmath>

#include "cad_internal.hpp"
#include "gromov/elimination.hpp"
#include "gromov/interval_eval.hpp"
#include "gromov/jet.hpp"

namespace gromov {

namespace detail {

namespace {

// rational bound just inside an algebraic endpoint, toward `target`
Rational inner_bound(const AlgebraicNumber& a, const Rational& target, bool from_below) {
  if (a.is_rational()) return a.rational_value();
  AlgebraicNumber c = a;
  while (!c.is_rational() && (from_below ? c.hi() >= target : c.lo() <= target)) {
    c.refine((c.hi() - c.lo()) / 2);
  }
  if (c.is_rational()) return c.rational_value();
  Rational gap = from_below ? target - c.hi() : c.lo() - target;
  c.refine(gap / 64);
  if (c.is_rational()) return c.rational_value();
  return from_below ? c.hi() : c.lo();
}

}  // namespace

std::vector<Rational> points_between(const AlgebraicNumber& a, const AlgebraicNumber& b,
                                     std::size_t n) {
  std::vector<Rational> out;
  if (n == 0) return out;
  Rational mid = rational_between(a, b);
  Rational lo = inner_bound(a, mid, true);
  Rational hi = inner_bound(b, mid, false);
  for (std::size_t i = 1; i <= n; ++i) {
    out.push_back(lo + (hi - lo) * ratio(static_cast<long>(i), static_cast<long>(n + 1)));
  }
  return out;
}

std::vector<AlgebraicNumber> fiber_roots_at(const MultiPoly& q, const Rational& y,
                                            const Rational& wlo, const Rational& whi) {
  UPoly u = UPoly::from_multi(q.specialize(1, y));
  if (u.is_zero()) throw DegenerateCellError("polynomial vanishes on a whole fiber");
  if (u.degree() < 1) return {};
  return real_roots(u, {wlo, whi});
}

bool vanishes_numerically(const MultiPoly& q, AlgebraicNumber x, AlgebraicNumber y) {
  Rational floor_w(1, mpz_class(1) << 64);
  for (int iter = 0; iter < 256; ++iter) {
    Interval box[2] = {x.interval(), y.interval()};
    Interval e = enclose(q, box);
    if (e.lo > 0 || e.hi < 0) return false;
    if (x.is_rational() && y.is_rational()) return q.evaluate(std::vector<Rational>{
                                                         x.rational_value(), y.rational_value()}) == 0;
    Rational wx = x.hi() - x.lo(), wy = y.hi() - y.lo();
    if (wx <= floor_w && wy <= floor_w) return true;
    x.refine(wx / 4);
    y.refine(wy / 4);
  }
  return true;
}

std::vector<AlgebraicNumber> fiber_roots_over(const MultiPoly& q, const AlgebraicNumber& y,
                                              const Rational& wlo, const Rational& whi) {
  if (y.is_rational()) return fiber_roots_at(q, y.rational_value(), wlo, whi);
  MultiPoly m = y.poly().to_multi(2, 1);
  MultiPoly r = resultant(q, m, 1);
  if (r.is_zero()) throw DegenerateCellError("polynomial vanishes on a whole fiber");
  UPoly u = UPoly::from_multi(r);
  std::vector<AlgebraicNumber> out;
  if (u.degree() < 1) return out;
  for (const auto& cand : real_roots(u, {wlo, whi}))
    if (vanishes_numerically(q, cand, y)) out.push_back(cand);
  return out;
}

int sign_at_point(const MultiPoly& p, const AlgebraicNumber& x, const AlgebraicNumber& y,
                  bool known_zero) {
  if (y.is_rational()) return sign_at(UPoly::from_multi(p.specialize(1, y.rational_value())), x);
  if (x.is_rational()) return sign_at(UPoly::from_multi(p.specialize(0, x.rational_value())), y);
  if (known_zero) return 0;
  AlgebraicNumber a = x, b = y;
  for (int iter = 0; iter < 400; ++iter) {
    Interval box[2] = {a.interval(), b.interval()};
    Interval e = enclose(p, box);
    if (e.lo > 0) return 1;
    if (e.hi < 0) return -1;
    a.refine((a.hi() - a.lo()) / 4);
    b.refine((b.hi() - b.lo()) / 4);
    if (a.is_rational() || b.is_rational()) return sign_at_point(p, a, b, false);
  }
  return 0;
}

}  // namespace detail

Rational BaseCell::sample() const {
  if (is_point()) return lo.rational_value();
  if (lo.is_rational() && hi.is_rational()) return midpoint(lo.rational_value(), hi.rational_value());
  return rational_between(lo, hi);
}

std::vector<Rational> BaseCell::samples(std::size_t count) const {
  if (is_point()) {
    if (lo.is_rational()) return {lo.rational_value()};
    return {};
  }
  return detail::points_between(lo, hi, count);
}

bool BaseCell::contains(const Rational& y) const {
  if (is_point()) return compare(lo, y) == 0;
  return compare(lo, y) < 0 && compare(hi, y) > 0;
}

AlgebraicNumber NashBranch::value_at(const Rational& y) const {
  auto roots = detail::fiber_roots_at(fiber, y, window_lo, window_hi);
  if (roots.size() < root_index) throw BranchError("branch index exceeds fiber root count");
  return roots[root_index - 1];
}

AlgebraicNumber NashBranch::value_at(const AlgebraicNumber& y) const {
  auto roots = detail::fiber_roots_over(fiber, y, window_lo, window_hi);
  if (roots.size() < root_index) throw BranchError("branch index exceeds fiber root count");
  return roots[root_index - 1];
}

double NashBranch::value_at(double y) const {
  auto coeffs = fiber.coefficients_in(0);
  std::vector<double> c;
  double yv[2] = {0.0, y};
  for (const auto& k : coeffs) c.push_back(k.evaluate(std::span<const double>(yv, 2)));
  auto roots = numeric_roots(c, window_lo.get_d(), window_hi.get_d());
  if (roots.size() < root_index) throw BranchError("branch index exceeds fiber root count");
  return roots[root_index - 1];
}

BranchJet branch_eval(const NashBranch& branch, const Rational& y, unsigned order) {
  if (!branch.base.contains(y)) throw BranchError("base point outside the branch cell");
  AlgebraicNumber z = branch.value_at(y);
  MultiPoly dz = branch.fiber.derivative(0);
  UPoly dz_y = UPoly::from_multi(dz.specialize(1, y));
  if (sign_at(dz_y, z) == 0) throw BranchError("branch singularity: fiber derivative vanishes");
  BranchJet out;
  out.exact = z.is_rational();
  // irrational roots: work with a 2^-96 rational approximation
  Rational z0 = z.is_rational() ? z.rational_value()
                                : midpoint(z.refined(Rational(1, mpz_class(1) << 96)).lo(),
                                           z.refined(Rational(1, mpz_class(1) << 96)).hi());
  auto layout = JetLayout::get(1, order);
  Jet<Rational> Y = Jet<Rational>::variable(layout, 0, y);
  Rational dfdz = dz.evaluate(std::vector<Rational>{z0, y});
  auto jet = implicit_jet<Rational>(layout, z0, dfdz, [&](const Jet<Rational>& Z) {
    std::vector<Jet<Rational>> args{Z, Y};
    return eval_poly<Rational>(branch.fiber, args, layout);
  });
  for (unsigned k = 0; k <= order; ++k) {
    Rational v = jet.derivative(Exponents{k});
    if (out.exact) out.exact_values.push_back(v);
    out.values.push_back(v.get_d());
  }
  return out;
}

}  // namespace gromov
