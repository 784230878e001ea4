#include "gromov/multipoly.hpp"

#include <algorithm>
#include <sstream>

namespace gromov {

namespace {

void check_var(std::size_t var, std::size_t nvars) {
  if (var >= nvars) {
    throw PolyError("variable index " + std::to_string(var) + " out of range for " +
                    std::to_string(nvars) + " variables");
  }
}

}  // namespace

MultiPoly MultiPoly::constant(std::size_t nvars, const Rational& c) {
  MultiPoly p(nvars);
  p.add_term(Exponents(nvars, 0), c);
  return p;
}

MultiPoly MultiPoly::variable(std::size_t nvars, std::size_t var) {
  check_var(var, nvars);
  Exponents e(nvars, 0);
  e[var] = 1;
  return monomial(e, 1);
}

MultiPoly MultiPoly::monomial(const Exponents& e, const Rational& c) {
  MultiPoly p(e.size());
  p.add_term(e, c);
  return p;
}

MultiPoly MultiPoly::from_dense(std::size_t nvars, std::size_t var,
                                std::span<const Rational> coeffs) {
  check_var(var, nvars);
  MultiPoly p(nvars);
  Exponents e(nvars, 0);
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    e[var] = static_cast<unsigned>(k);
    p.add_term(e, coeffs[k]);
  }
  return p;
}

bool MultiPoly::is_constant() const {
  return terms_.empty() ||
         (terms_.size() == 1 &&
          std::all_of(terms_.begin()->first.begin(), terms_.begin()->first.end(),
                      [](unsigned k) { return k == 0; }));
}

Rational MultiPoly::constant_term() const {
  auto it = terms_.find(Exponents(nvars_, 0));
  return it == terms_.end() ? Rational(0) : it->second;
}

unsigned MultiPoly::total_degree() const {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) {
    unsigned s = 0;
    for (unsigned k : e) s += k;
    d = std::max(d, s);
  }
  return d;
}

unsigned MultiPoly::degree_in(std::size_t var) const {
  check_var(var, nvars_);
  unsigned d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
  return d;
}

bool MultiPoly::depends_on(std::size_t var) const { return degree_in(var) > 0; }

std::vector<std::size_t> MultiPoly::used_variables() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < nvars_; ++v)
    if (depends_on(v)) out.push_back(v);
  return out;
}

const Rational& MultiPoly::leading_coefficient() const {
  if (terms_.empty()) throw PolyError("leading coefficient of the zero polynomial");
  return terms_.rbegin()->second;
}

void MultiPoly::add_term(const Exponents& e, const Rational& c) {
  if (e.size() != nvars_) throw PolyError("exponent vector length mismatch");
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

MultiPoly MultiPoly::operator-() const {
  MultiPoly r = *this;
  for (auto& [e, c] : r.terms_) c = -c;
  return r;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  if (terms_.empty() && nvars_ == 0) nvars_ = o.nvars_;
  if (o.nvars_ != nvars_ && !o.terms_.empty()) throw PolyError("variable count mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  if (terms_.empty() && nvars_ == 0) nvars_ = o.nvars_;
  if (o.nvars_ != nvars_ && !o.terms_.empty()) throw PolyError("variable count mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

MultiPoly& MultiPoly::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  if (a.nvars_ != b.nvars_) throw PolyError("variable count mismatch");
  MultiPoly r(a.nvars_);
  Exponents e(a.nvars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

MultiPoly MultiPoly::pow(unsigned e) const {
  MultiPoly r = constant(nvars_, 1);
  MultiPoly b = *this;
  while (e != 0) {
    if (e & 1U) r = r * b;
    e >>= 1U;
    if (e != 0) b = b * b;
  }
  return r;
}

Rational MultiPoly::evaluate(std::span<const Rational> point) const {
  if (point.size() != nvars_) throw PolyError("evaluation point dimension mismatch");
  Rational sum = 0;
  for (const auto& [e, c] : terms_) {
    Rational t = c;
    for (std::size_t i = 0; i < nvars_; ++i)
      if (e[i] != 0) t *= power(point[i], e[i]);
    sum += t;
  }
  return sum;
}

double MultiPoly::evaluate(std::span<const double> point) const {
  if (point.size() != nvars_) throw PolyError("evaluation point dimension mismatch");
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = c.get_d();
    for (std::size_t i = 0; i < nvars_; ++i)
      for (unsigned k = 0; k < e[i]; ++k) t *= point[i];
    sum += t;
  }
  return sum;
}

MultiPoly MultiPoly::derivative(std::size_t var) const {
  check_var(var, nvars_);
  MultiPoly r(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponents d = e;
    d[var] -= 1;
    r.add_term(d, c * e[var]);
  }
  return r;
}

std::vector<MultiPoly> MultiPoly::coefficients_in(std::size_t var) const {
  check_var(var, nvars_);
  std::vector<MultiPoly> out(degree_in(var) + 1, MultiPoly(nvars_));
  for (const auto& [e, c] : terms_) {
    Exponents r = e;
    r[var] = 0;
    out[e[var]].add_term(r, c);
  }
  return out;
}

MultiPoly MultiPoly::from_coefficients(std::size_t nvars, std::size_t var,
                                       const std::vector<MultiPoly>& coeffs) {
  check_var(var, nvars);
  MultiPoly p(nvars);
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    for (const auto& [e, c] : coeffs[k].terms()) {
      Exponents r = e;
      r[var] += static_cast<unsigned>(k);
      p.add_term(r, c);
    }
  }
  return p;
}

MultiPoly MultiPoly::leading_coefficient_in(std::size_t var) const {
  if (is_zero()) return MultiPoly(nvars_);
  return coefficients_in(var).back();
}

MultiPoly MultiPoly::specialize(std::size_t var, const Rational& value) const {
  check_var(var, nvars_);
  MultiPoly r(nvars_);
  for (const auto& [e, c] : terms_) {
    Exponents d = e;
    d[var] = 0;
    r.add_term(d, c * power(value, e[var]));
  }
  return r;
}

MultiPoly MultiPoly::substitute(std::size_t var, const MultiPoly& value) const {
  check_var(var, nvars_);
  if (value.nvars_ != nvars_) throw PolyError("substitute: variable count mismatch");
  auto coeffs = coefficients_in(var);
  // Horner in the substituted variable
  MultiPoly r(nvars_);
  for (std::size_t k = coeffs.size(); k-- > 0;) r = r * value + coeffs[k];
  return r;
}

MultiPoly MultiPoly::compose(std::span<const MultiPoly> values) const {
  if (values.size() != nvars_) throw PolyError("compose: need one value per variable");
  std::size_t target = values.empty() ? 0 : values[0].nvars();
  for (const auto& v : values)
    if (v.nvars() != target) throw PolyError("compose: inconsistent value rings");
  MultiPoly r(target);
  std::vector<std::vector<MultiPoly>> powers(nvars_);
  for (const auto& [e, c] : terms_) {
    MultiPoly t = constant(target, c);
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      auto& cache = powers[i];
      if (cache.empty()) cache.push_back(constant(target, 1));
      while (cache.size() <= e[i]) cache.push_back(cache.back() * values[i]);
      t = t * cache[e[i]];
    }
    r += t;
  }
  return r;
}

MultiPoly MultiPoly::remap(std::size_t new_nvars, std::span<const std::size_t> mapping) const {
  if (mapping.size() != nvars_) throw PolyError("remap: mapping size mismatch");
  MultiPoly r(new_nvars);
  for (const auto& [e, c] : terms_) {
    Exponents d(new_nvars, 0);
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      check_var(mapping[i], new_nvars);
      d[mapping[i]] += e[i];
    }
    r.add_term(d, c);
  }
  return r;
}

std::vector<Rational> MultiPoly::dense_in(std::size_t var) const {
  check_var(var, nvars_);
  std::vector<Rational> out(degree_in(var) + 1, Rational(0));
  for (const auto& [e, c] : terms_) {
    for (std::size_t i = 0; i < nvars_; ++i)
      if (i != var && e[i] != 0) throw PolyError("dense_in: polynomial is not univariate");
    out[e[var]] += c;
  }
  return out;
}

std::string MultiPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    Rational mag = abs_value(c);
    bool neg = sgn(c) < 0;
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    bool has_var = std::any_of(e.begin(), e.end(), [](unsigned k) { return k != 0; });
    bool unit = mag == 1;
    if (!has_var || !unit) {
      if (mag.get_den() == 1)
        os << mag.get_str();
      else
        os << "(" << mag.get_str() << ")";
    }
    bool need_star = !has_var ? false : !unit;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (need_star) os << "*";
      os << "x" << (i + 1);
      if (e[i] > 1) os << "^" << e[i];
      need_star = true;
    }
  }
  return os.str();
}

}  // namespace gromov
