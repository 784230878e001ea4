#include "gromov/elimination.hpp"

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

namespace gromov {

namespace {

bool divides_monomial(const Exponents& d, const Exponents& n) {
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] > n[i]) return false;
  return true;
}

std::optional<std::size_t> main_variable(const MultiPoly& a, const MultiPoly& b) {
  std::size_t n = std::max(a.nvars(), b.nvars());
  for (std::size_t v = n; v-- > 0;) {
    if ((v < a.nvars() && a.depends_on(v)) || (v < b.nvars() && b.depends_on(v))) return v;
  }
  return std::nullopt;
}

}  // namespace

MultiPoly divide_exact(const MultiPoly& a, const MultiPoly& b) {
  if (b.is_zero()) throw PolyError("division by the zero polynomial");
  if (a.nvars() != b.nvars() && !a.is_zero()) throw PolyError("variable count mismatch");
  MultiPoly q(b.nvars());
  MultiPoly r = a;
  const auto& [be, bc] = *b.terms().rbegin();
  while (!r.is_zero()) {
    const auto& [re, rc] = *r.terms().rbegin();
    if (!divides_monomial(be, re)) throw PolyError("inexact polynomial division");
    Exponents e(re.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = re[i] - be[i];
    MultiPoly t = MultiPoly::monomial(e, rc / bc);
    q += t;
    r -= t * b;
  }
  return q;
}

MultiPoly pseudo_remainder(const MultiPoly& a, const MultiPoly& b, std::size_t var) {
  if (b.is_zero()) throw PolyError("pseudo-remainder by zero");
  unsigned db = b.degree_in(var);
  MultiPoly lb = b.leading_coefficient_in(var);
  MultiPoly r = a;
  while (!r.is_zero() && r.degree_in(var) >= db) {
    unsigned dr = r.degree_in(var);
    MultiPoly lr = r.leading_coefficient_in(var);
    Exponents shift(r.nvars(), 0);
    shift[var] = dr - db;
    r = lb * r - lr * MultiPoly::monomial(shift, 1) * b;
  }
  return r;
}

MultiPoly make_monic(const MultiPoly& p) {
  if (p.is_zero()) return p;
  return p * (Rational(1) / p.leading_coefficient());
}

MultiPoly content_in(const MultiPoly& p, std::size_t var) {
  MultiPoly g(p.nvars());
  for (const auto& c : p.coefficients_in(var)) {
    if (c.is_zero()) continue;
    g = poly_gcd(g, c);
    if (g.is_constant()) return MultiPoly::constant(p.nvars(), 1);
  }
  return g;
}

MultiPoly primitive_part_in(const MultiPoly& p, std::size_t var) {
  if (p.is_zero()) return p;
  return divide_exact(p, content_in(p, var));
}

MultiPoly poly_gcd(const MultiPoly& a, const MultiPoly& b) {
  if (a.is_zero()) return make_monic(b);
  if (b.is_zero()) return make_monic(a);
  if (a.nvars() != b.nvars()) throw PolyError("gcd: variable count mismatch");
  auto v = main_variable(a, b);
  if (!v) return MultiPoly::constant(a.nvars(), 1);
  if (!a.depends_on(*v)) return poly_gcd(a, content_in(b, *v));
  if (!b.depends_on(*v)) return poly_gcd(content_in(a, *v), b);
  MultiPoly ca = content_in(a, *v);
  MultiPoly cb = content_in(b, *v);
  MultiPoly c = poly_gcd(ca, cb);
  MultiPoly f = divide_exact(a, ca);
  MultiPoly g = divide_exact(b, cb);
  if (f.degree_in(*v) < g.degree_in(*v)) std::swap(f, g);
  while (true) {
    MultiPoly r = pseudo_remainder(f, g, *v);
    if (r.is_zero()) break;
    if (!r.depends_on(*v)) {
      g = MultiPoly::constant(a.nvars(), 1);
      break;
    }
    f = std::move(g);
    g = primitive_part_in(r, *v);
  }
  return make_monic(c * primitive_part_in(g, *v));
}

MultiPoly squarefree_in(const MultiPoly& p, std::size_t var) {
  if (p.is_zero()) throw PolyError("square-free part of the zero polynomial");
  if (!p.depends_on(var)) return MultiPoly::constant(p.nvars(), 1);
  MultiPoly g = poly_gcd(p, p.derivative(var));
  return make_monic(divide_exact(p, g));
}

MultiPoly resultant(const MultiPoly& p, const MultiPoly& q, std::size_t var) {
  if (p.is_zero() && q.is_zero()) throw PolyError("resultant of two zero polynomials");
  std::size_t nv = std::max(p.nvars(), q.nvars());
  if (p.is_zero() || q.is_zero()) return MultiPoly(nv);
  if (p.nvars() != q.nvars()) throw PolyError("resultant: variable count mismatch");
  unsigned m = p.degree_in(var);
  unsigned n = q.degree_in(var);
  if (m == 0 && n == 0) return MultiPoly::constant(nv, 1);
  if (m == 0) return p.pow(n);
  if (n == 0) return q.pow(m);
  auto pc = p.coefficients_in(var);
  auto qc = q.coefficients_in(var);
  std::size_t size = m + n;
  std::vector<std::vector<MultiPoly>> mat(size, std::vector<MultiPoly>(size, MultiPoly(nv)));
  for (std::size_t row = 0; row < n; ++row)
    for (std::size_t k = 0; k <= m; ++k) mat[row][row + k] = pc[m - k];
  for (std::size_t row = 0; row < m; ++row)
    for (std::size_t k = 0; k <= n; ++k) mat[n + row][row + k] = qc[n - k];

  // Bareiss fraction-free elimination
  MultiPoly prev = MultiPoly::constant(nv, 1);
  bool negate = false;
  for (std::size_t k = 0; k + 1 < size; ++k) {
    if (mat[k][k].is_zero()) {
      std::size_t swap_row = k + 1;
      while (swap_row < size && mat[swap_row][k].is_zero()) ++swap_row;
      if (swap_row == size) return MultiPoly(nv);
      std::swap(mat[k], mat[swap_row]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < size; ++i) {
      for (std::size_t j = k + 1; j < size; ++j) {
        MultiPoly num = mat[i][j] * mat[k][k] - mat[i][k] * mat[k][j];
        mat[i][j] = divide_exact(num, prev);
      }
      mat[i][k] = MultiPoly(nv);
    }
    prev = mat[k][k];
  }
  MultiPoly det = mat[size - 1][size - 1];
  return negate ? -det : det;
}

MultiPoly discriminant(const MultiPoly& p, std::size_t var) {
  return resultant(p, p.derivative(var), var);
}

}  // namespace gromov
