#include "gromov/upoly.hpp"

#include <algorithm>
#include <cmath>

namespace gromov {

UPoly::UPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

void UPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

UPoly UPoly::from_multi(const MultiPoly& p) {
  auto used = p.used_variables();
  if (used.size() > 1) throw PolyError("polynomial is not univariate: " + p.to_string());
  if (p.is_zero()) return UPoly();
  if (used.empty()) return UPoly({p.constant_term()});
  return UPoly(p.dense_in(used[0]));
}

MultiPoly UPoly::to_multi(std::size_t nvars, std::size_t var) const {
  return MultiPoly::from_dense(nvars, var, c_);
}

const Rational& UPoly::lc() const {
  if (c_.empty()) throw PolyError("leading coefficient of the zero polynomial");
  return c_.back();
}

Rational UPoly::evaluate(const Rational& x) const {
  Rational r = 0;
  for (std::size_t k = c_.size(); k-- > 0;) {
    r *= x;
    r += c_[k];
  }
  return r;
}

double UPoly::evaluate(double x) const {
  double r = 0.0;
  for (std::size_t k = c_.size(); k-- > 0;) r = r * x + c_[k].get_d();
  return r;
}

UPoly UPoly::derivative() const {
  if (c_.size() <= 1) return UPoly();
  std::vector<Rational> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<unsigned long>(k);
  return UPoly(std::move(d));
}

UPoly UPoly::monic() const {
  if (c_.empty()) return *this;
  UPoly r = *this;
  Rational l = lc();
  for (auto& v : r.c_) v /= l;
  return r;
}

UPoly UPoly::sign_normalized() const {
  if (c_.empty()) return *this;
  UPoly r = *this;
  Rational l = abs_value(lc());
  for (auto& v : r.c_) v /= l;
  return r;
}

UPoly UPoly::operator-() const {
  UPoly r = *this;
  for (auto& v : r.c_) v = -v;
  return r;
}

UPoly operator+(const UPoly& a, const UPoly& b) {
  std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()), Rational(0));
  for (std::size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
  for (std::size_t k = 0; k < b.c_.size(); ++k) c[k] += b.c_[k];
  return UPoly(std::move(c));
}

UPoly operator-(const UPoly& a, const UPoly& b) { return a + (-b); }

UPoly operator*(const UPoly& a, const UPoly& b) {
  if (a.is_zero() || b.is_zero()) return UPoly();
  std::vector<Rational> c(a.c_.size() + b.c_.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return UPoly(std::move(c));
}

std::pair<UPoly, UPoly> UPoly::divmod(const UPoly& a, const UPoly& b) {
  if (b.is_zero()) throw PolyError("division by the zero polynomial");
  if (a.degree() < b.degree()) return {UPoly(), a};
  std::vector<Rational> q(a.c_.size() - b.c_.size() + 1, Rational(0));
  std::vector<Rational> r = a.c_;
  const Rational& l = b.lc();
  for (std::size_t k = q.size(); k-- > 0;) {
    Rational t = r[k + b.c_.size() - 1] / l;
    q[k] = t;
    if (t == 0) continue;
    for (std::size_t j = 0; j < b.c_.size(); ++j) r[k + j] -= t * b.c_[j];
  }
  r.resize(b.c_.size() - 1);
  return {UPoly(std::move(q)), UPoly(std::move(r))};
}

UPoly gcd(UPoly a, UPoly b) {
  while (!b.is_zero()) {
    auto r = UPoly::divmod(a, b).second;
    a = std::move(b);
    b = r.is_zero() ? r : r.monic();
  }
  return a.monic();
}

UPoly squarefree_part(const UPoly& p) {
  if (p.degree() <= 0) return p.sign_normalized();
  UPoly g = gcd(p, p.derivative());
  return UPoly::divmod(p, g).first.sign_normalized();
}

std::vector<UPoly> sturm_chain(const UPoly& p) {
  std::vector<UPoly> chain;
  if (p.is_zero()) return chain;
  chain.push_back(p);
  UPoly d = p.derivative();
  if (d.is_zero()) return chain;
  chain.push_back(d.sign_normalized());
  while (true) {
    auto r = UPoly::divmod(chain[chain.size() - 2], chain.back()).second;
    if (r.is_zero()) break;
    chain.push_back((-r).sign_normalized());
  }
  return chain;
}

namespace {

int count_changes(const std::vector<int>& signs) {
  int changes = 0;
  int last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

// Sign of q just to the right (dir = +1) or left (dir = -1) of x.
int one_sided_sign(const UPoly& q, const Rational& x, int dir) {
  UPoly d = q;
  int flip = 1;
  while (!d.is_zero()) {
    int s = d.sign_at(x);
    if (s != 0) return s * flip;
    d = d.derivative();
    flip *= dir;
  }
  return 0;
}

}  // namespace

int sign_variations(const std::vector<UPoly>& chain, const Rational& x) {
  std::vector<int> s;
  s.reserve(chain.size());
  for (const auto& q : chain) s.push_back(q.sign_at(x));
  return count_changes(s);
}

unsigned sturm_count_open(const std::vector<UPoly>& chain, const Rational& a,
                          const Rational& b) {
  if (chain.empty()) throw PolyError("sturm count of the zero polynomial");
  if (!(a < b)) return 0;
  std::vector<int> sa, sb;
  for (const auto& q : chain) {
    sa.push_back(one_sided_sign(q, a, +1));
    sb.push_back(one_sided_sign(q, b, -1));
  }
  int v = count_changes(sa) - count_changes(sb);
  return v > 0 ? static_cast<unsigned>(v) : 0U;
}

unsigned sturm_count(const UPoly& p, const Rational& a, const Rational& b) {
  if (p.is_zero()) throw PolyError("sturm count of the zero polynomial");
  if (!(a < b)) throw std::invalid_argument("sturm_count requires a < b");
  UPoly s = squarefree_part(p);
  if (s.sign_at(a) == 0 || s.sign_at(b) == 0) {
    throw EndpointRootError("interval endpoint is a root; perturb or refine the interval");
  }
  auto chain = sturm_chain(s);
  return static_cast<unsigned>(sign_variations(chain, a) - sign_variations(chain, b));
}

namespace {

// A split point strictly inside (lo, hi) that is not a root of p.
Rational non_root_split(const UPoly& p, const Rational& lo, const Rational& hi) {
  Rational w = hi - lo;
  // 1/2, 1/3, 2/3, 1/4, 3/4, ... : finitely many roots, so this terminates
  for (long den = 2; den < 4096; ++den) {
    for (long num = 1; num < den; ++num) {
      Rational frac(num, den);
      frac.canonicalize();
      if (frac.get_den() != den) continue;
      Rational m = lo + w * frac;
      if (p.sign_at(m) != 0) return m;
    }
  }
  throw PolyError("no non-root split point found");
}

void isolate_rec(const UPoly& p, const std::vector<UPoly>& chain, const Rational& lo,
                 const Rational& hi, unsigned count, std::vector<Interval>& out) {
  if (count == 0) return;
  if (count == 1) {
    out.push_back({lo, hi});
    return;
  }
  Rational m = non_root_split(p, lo, hi);
  unsigned left = sturm_count_open(chain, lo, m);
  isolate_rec(p, chain, lo, m, left, out);
  isolate_rec(p, chain, m, hi, count - left, out);
}

}  // namespace

std::vector<Interval> isolate_real_roots(const UPoly& p, const Interval& range) {
  if (p.is_zero()) throw PolyError("cannot isolate roots of the zero polynomial");
  if (!(range.lo < range.hi)) throw std::invalid_argument("empty isolation range");
  UPoly s = squarefree_part(p);
  std::vector<Interval> out;
  if (s.degree() <= 0) return out;
  auto chain = sturm_chain(s);
  Rational lo = range.lo;
  Rational hi = range.hi;
  // move root endpoints inward past any root-free margin
  if (s.sign_at(lo) == 0 || s.sign_at(hi) == 0) {
    unsigned total = sturm_count_open(chain, lo, hi);
    if (total == 0) return out;
    if (s.sign_at(lo) == 0) {
      Rational step = (hi - lo) / 2;
      while (s.sign_at(lo + step) == 0 || sturm_count_open(chain, lo, lo + step) != 0)
        step /= 2;
      lo += step;
    }
    if (s.sign_at(hi) == 0) {
      Rational step = (hi - lo) / 2;
      while (s.sign_at(hi - step) == 0 || sturm_count_open(chain, hi - step, hi) != 0)
        step /= 2;
      hi -= step;
    }
  }
  unsigned total = sturm_count_open(chain, lo, hi);
  isolate_rec(s, chain, lo, hi, total, out);
  return out;
}

Interval refine_root(const UPoly& sqf, Interval iv, const Rational& width) {
  if (iv.lo == iv.hi) return iv;
  int slo = sqf.sign_at(iv.lo);
  while (iv.hi - iv.lo > width) {
    Rational m = midpoint(iv.lo, iv.hi);
    int sm = sqf.sign_at(m);
    if (sm == 0) return {m, m};
    if (sm == slo) {
      iv.lo = m;
    } else {
      iv.hi = m;
    }
  }
  return iv;
}

namespace {

double horner(const std::vector<double>& c, double x) {
  double r = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) r = r * x + c[k];
  return r;
}

double bisect(const std::vector<double>& c, double a, double b) {
  double fa = horner(c, a);
  for (int it = 0; it < 200; ++it) {
    double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    double fm = horner(c, m);
    if (fm == 0.0) return m;
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<double> numeric_roots(const std::vector<double>& coeffs, double lo, double hi) {
  std::vector<double> c = coeffs;
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  std::vector<double> out;
  if (c.size() <= 1 || !(lo < hi)) return out;
  if (c.size() == 2) {
    double r = -c[0] / c[1];
    if (r > lo && r < hi) out.push_back(r);
    return out;
  }
  std::vector<double> d(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = c[k] * static_cast<double>(k);
  std::vector<double> knots{lo};
  for (double x : numeric_roots(d, lo, hi)) knots.push_back(x);
  knots.push_back(hi);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    double a = knots[i], b = knots[i + 1];
    double fa = horner(c, a), fb = horner(c, b);
    if (fa == 0.0 && i > 0) {
      if (out.empty() || out.back() != a) out.push_back(a);
      continue;
    }
    if (fb == 0.0) continue;
    if ((fa < 0) != (fb < 0) && fa != 0.0) out.push_back(bisect(c, a, b));
  }
  return out;
}

}  // namespace gromov
