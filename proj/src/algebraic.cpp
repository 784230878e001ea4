#include "gromov/algebraic.hpp"

#include <cmath>
#include <stdexcept>

namespace gromov {

namespace {

// Recovers an exact small-denominator rational root when one exists.
std::optional<Rational> detect_rational_root(const UPoly& sqf, Interval iv) {
  if (sqf.degree() == 1) return -sqf.coeffs()[0] / sqf.coeffs()[1];
  Interval r = refine_root(sqf, iv, Rational(1, 1L << 30));
  if (r.lo == r.hi) return r.lo;
  double approx = to_double(midpoint(r.lo, r.hi));
  Rational cand = best_approximation(approx, 1L << 14);
  if (cand > r.lo && cand < r.hi && sqf.sign_at(cand) == 0) return cand;
  return std::nullopt;
}

}  // namespace

AlgebraicNumber::AlgebraicNumber(const Rational& value)
    : poly_(std::vector<Rational>{-value, Rational(1)}), lo_(value), hi_(value) {}

AlgebraicNumber::AlgebraicNumber(const UPoly& poly, const Interval& iv)
    : poly_(squarefree_part(poly)), lo_(iv.lo), hi_(iv.hi) {
  if (poly_.degree() < 1) throw PolyError("algebraic number needs a non-constant polynomial");
  if (lo_ == hi_) {
    if (poly_.sign_at(lo_) != 0) throw PolyError("degenerate interval is not a root");
    poly_ = UPoly(std::vector<Rational>{-lo_, Rational(1)});
    return;
  }
  if (auto exact = detect_rational_root(poly_, iv)) {
    lo_ = hi_ = *exact;
    poly_ = UPoly(std::vector<Rational>{-*exact, Rational(1)});
  }
}

const Rational& AlgebraicNumber::rational_value() const {
  if (!is_rational()) throw std::logic_error("algebraic number is irrational");
  return lo_;
}

void AlgebraicNumber::refine(const Rational& w) {
  if (is_rational()) return;
  Interval r = refine_root(poly_, {lo_, hi_}, w);
  lo_ = r.lo;
  hi_ = r.hi;
  if (lo_ == hi_) poly_ = UPoly(std::vector<Rational>{-lo_, Rational(1)});
}

AlgebraicNumber AlgebraicNumber::refined(const Rational& w) const {
  AlgebraicNumber c = *this;
  c.refine(w);
  return c;
}

double AlgebraicNumber::to_double() const {
  if (is_rational()) return lo_.get_d();
  AlgebraicNumber c = refined(Rational(1, mpz_class(1) << 62));
  return midpoint(c.lo_, c.hi_).get_d();
}

Rational rational_between(const AlgebraicNumber& a, const AlgebraicNumber& b) {
  AlgebraicNumber x = a, y = b;
  Rational w = std::max(x.hi_ - x.lo_, y.hi_ - y.lo_);
  for (int iter = 0; iter < 4096; ++iter) {
    if (x.hi_ < y.lo_) return midpoint(x.hi_, y.lo_);
    if (x.is_rational() && y.is_rational()) break;
    w /= 2;
    x.refine(w);
    y.refine(w);
  }
  throw std::logic_error("rational_between requires a < b");
}

int sign_at(const UPoly& p, const Rational& x) { return p.sign_at(x); }

int sign_at(const UPoly& p, const AlgebraicNumber& x) {
  if (p.is_zero()) return 0;
  if (x.is_rational()) return p.sign_at(x.rational_value());
  if (p.degree() == 0) return sgn(p.coeffs()[0]);
  UPoly g = gcd(p, x.poly());
  if (g.degree() >= 1) {
    // endpoints are not roots of x.poly(), hence not roots of g
    auto chain = sturm_chain(g);
    if (sturm_count_open(chain, x.lo(), x.hi()) > 0) return 0;
  }
  UPoly s = squarefree_part(p);
  auto chain = sturm_chain(s);
  AlgebraicNumber c = x;
  Rational w = c.hi() - c.lo();
  while (true) {
    if (c.is_rational()) return p.sign_at(c.rational_value());
    if (s.sign_at(c.lo()) != 0 && s.sign_at(c.hi()) != 0 &&
        sturm_count_open(chain, c.lo(), c.hi()) == 0) {
      return p.sign_at(c.lo());
    }
    w /= 2;
    c.refine(w);
  }
}

int compare(const AlgebraicNumber& a, const Rational& q) {
  if (a.is_rational()) return sgn(a.rational_value() - q);
  if (q <= a.lo()) return 1;
  if (q >= a.hi()) return -1;
  int sq = a.poly().sign_at(q);
  if (sq == 0) return 0;
  // root lies on the side where the sign differs from sign at q
  int slo = a.poly().sign_at(a.lo());
  return slo == sq ? 1 : -1;
}

int compare(const AlgebraicNumber& a, const AlgebraicNumber& b) {
  if (a.is_rational()) return -compare(b, a.rational_value());
  if (b.is_rational()) return compare(a, b.rational_value());
  if (a.hi() <= b.lo()) return -1;
  if (b.hi() <= a.lo()) return 1;
  // overlapping intervals: equal iff the gcd has a root in the overlap
  Rational lo = std::max(a.lo(), b.lo());
  Rational hi = std::min(a.hi(), b.hi());
  UPoly g = gcd(a.poly(), b.poly());
  // overlap lies inside both isolating intervals, so a root of g there is
  // the root of both defining polynomials
  if (g.degree() >= 1 && sturm_count_open(sturm_chain(g), lo, hi) > 0) return 0;
  AlgebraicNumber x = a, y = b;
  Rational w = std::min(a.hi() - a.lo(), b.hi() - b.lo());
  for (int iter = 0; iter < 200; ++iter) {
    w /= 2;
    x.refine(w);
    y.refine(w);
    if (x.is_rational() || y.is_rational()) return compare(x, y);
    if (x.hi() <= y.lo()) return -1;
    if (y.hi() <= x.lo()) return 1;
  }
  return 0;
}

std::vector<AlgebraicNumber> real_roots(const UPoly& p, const Interval& range) {
  std::vector<AlgebraicNumber> out;
  UPoly s = squarefree_part(p);
  for (const auto& iv : isolate_real_roots(s, range)) out.emplace_back(s, iv);
  return out;
}

}  // namespace gromov
