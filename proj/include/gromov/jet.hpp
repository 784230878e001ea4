#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "gromov/multipoly.hpp"
#include "gromov/rational.hpp"

namespace gromov {

/// Monomial bookkeeping shared by all jets with the same variable count and
/// truncation order. Index 0 is the constant monomial; monomials are sorted
/// by total degree.
struct JetLayout {
  std::size_t nvars = 0;
  unsigned order = 0;
  std::vector<Exponents> monomials;
  std::map<Exponents, std::size_t> index;
  // products[i] lists (j, k) with monomial i * monomial j = monomial k
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> products;
  // beta! for each monomial (derivative = factorial * Taylor coefficient)
  std::vector<double> factorial;
  std::vector<Rational> factorial_exact;

  static std::shared_ptr<const JetLayout> get(std::size_t nvars, unsigned order);
  std::size_t size() const { return monomials.size(); }
  std::size_t at(const Exponents& e) const;
};

template <class T>
T scalar_from(const Rational& q);
template <>
inline double scalar_from<double>(const Rational& q) {
  return q.get_d();
}
template <>
inline Rational scalar_from<Rational>(const Rational& q) {
  return q;
}

/// Truncated multivariate Taylor polynomial: coefficient of x^beta is
/// d^beta f / beta!. Arithmetic drops every monomial above the order.
template <class T>
class Jet {
 public:
  Jet() = default;
  explicit Jet(std::shared_ptr<const JetLayout> layout)
      : layout_(std::move(layout)), c_(layout_->size(), T(0)) {}

  static Jet constant(std::shared_ptr<const JetLayout> layout, const T& v) {
    Jet j(std::move(layout));
    j.c_[0] = v;
    return j;
  }
  static Jet variable(std::shared_ptr<const JetLayout> layout, std::size_t var, const T& v) {
    Jet j = constant(layout, v);
    if (layout->order >= 1) {
      Exponents e(layout->nvars, 0);
      e[var] = 1;
      j.c_[layout->at(e)] = T(1);
    }
    return j;
  }

  const std::shared_ptr<const JetLayout>& layout() const { return layout_; }
  const T& value() const { return c_[0]; }
  T& operator[](std::size_t i) { return c_[i]; }
  const T& operator[](std::size_t i) const { return c_[i]; }
  std::size_t size() const { return c_.size(); }

  /// Partial derivative d^beta f at the expansion point.
  T derivative(const Exponents& beta) const {
    std::size_t i = layout_->at(beta);
    if constexpr (std::is_same_v<T, double>) {
      return c_[i] * layout_->factorial[i];
    } else {
      return c_[i] * layout_->factorial_exact[i];
    }
  }

  Jet operator-() const {
    Jet r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
  }
  Jet& operator+=(const Jet& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Jet& operator*=(const T& s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  Jet& operator+=(const T& s) {
    c_[0] += s;
    return *this;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, const T& s) { return a *= s; }
  friend Jet operator*(const T& s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, const T& s) { return a += s; }
  friend Jet operator-(const T& s, const Jet& a) {
    Jet r = -a;
    r.c_[0] += s;
    return r;
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r(a.layout_);
    const auto& prods = a.layout_->products;
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == 0) continue;
      for (const auto& [j, k] : prods[i]) {
        if (b.c_[j] == 0) continue;
        r.c_[k] += a.c_[i] * b.c_[j];
      }
    }
    return r;
  }

  /// 1 / f; requires a nonzero value.
  Jet reciprocal() const {
    if (c_[0] == 0) throw std::domain_error("reciprocal of a jet with zero value");
    T inv = T(1) / c_[0];
    Jet u = *this * inv;
    u.c_[0] = T(0);
    // 1 / (1 + u) = 1 - u (1 - u (1 - ...)), u nilpotent
    Jet h = constant(layout_, T(1));
    for (unsigned k = 0; k < layout_->order; ++k) h = T(1) - u * h;
    return h * inv;
  }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * b.reciprocal(); }

  Jet pow(unsigned e) const {
    Jet r = constant(layout_, T(1));
    Jet b = *this;
    while (e) {
      if (e & 1U) r = r * b;
      e >>= 1U;
      if (e) b = b * b;
    }
    return r;
  }

 private:
  std::shared_ptr<const JetLayout> layout_;
  std::vector<T> c_;
};

/// Evaluates a polynomial whose variable i is replaced by args[i].
template <class T>
Jet<T> eval_poly(const MultiPoly& p, std::span<const Jet<T>> args,
                 const std::shared_ptr<const JetLayout>& layout) {
  if (args.size() < p.nvars()) throw PolyError("eval_poly: too few arguments");
  // cache powers per variable
  std::vector<std::vector<Jet<T>>> powers(p.nvars());
  for (std::size_t v = 0; v < p.nvars(); ++v) {
    unsigned dv = p.degree_in(v);
    powers[v].reserve(dv + 1);
    powers[v].push_back(Jet<T>::constant(layout, T(1)));
    for (unsigned k = 1; k <= dv; ++k) powers[v].push_back(powers[v].back() * args[v]);
  }
  Jet<T> acc(layout);
  for (const auto& [e, c] : p.terms()) {
    Jet<T> term = Jet<T>::constant(layout, scalar_from<T>(c));
    for (std::size_t v = 0; v < e.size(); ++v)
      if (e[v] > 0) term = term * powers[v][e[v]];
    acc += term;
  }
  return acc;
}

/// Jet of z(x) solving F(z(x), x) = 0 given the exact value z0 and the
/// scalar dF/dz at the root. `residual` maps a z-jet to the jet of F.
/// Chord iteration gains one order per step.
template <class T, class Residual>
Jet<T> implicit_jet(const std::shared_ptr<const JetLayout>& layout, const T& z0, const T& dfdz,
                    Residual&& residual) {
  if (dfdz == 0) throw std::domain_error("implicit jet: singular fiber derivative");
  Jet<T> z = Jet<T>::constant(layout, z0);
  T inv = T(1) / dfdz;
  for (unsigned k = 0; k < layout->order; ++k) {
    Jet<T> f = residual(z);
    f[0] = T(0);  // keep the value pinned to the supplied root
    z -= f * inv;
  }
  return z;
}

}  // namespace gromov
