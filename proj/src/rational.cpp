#include "gromov/rational.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gromov {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  if (s.find_first_of(".eE") != std::string::npos) {
    // decimal literal: mantissa and optional exponent, converted exactly
    std::size_t epos = s.find_first_of("eE");
    std::string mant = s.substr(0, epos);
    long exp10 = 0;
    if (epos != std::string::npos) exp10 = std::stol(s.substr(epos + 1));
    bool neg = false;
    if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
      neg = mant[0] == '-';
      mant.erase(0, 1);
    }
    std::size_t dot = mant.find('.');
    std::string digits = mant;
    if (dot != std::string::npos) {
      digits = mant.substr(0, dot) + mant.substr(dot + 1);
      exp10 -= static_cast<long>(mant.size() - dot - 1);
    }
    if (digits.empty()) throw std::invalid_argument("bad decimal literal: " + s);
    mpz_class num(digits, 10);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
    Rational q = exp10 >= 0 ? Rational(num * scale) : Rational(num, scale);
    q.canonicalize();
    return neg ? Rational(-q) : q;
  }
  Rational q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
  q.canonicalize();
  return q;
}

Rational best_approximation(double x, std::int64_t max_den) {
  if (!std::isfinite(x)) throw std::invalid_argument("best_approximation of non-finite value");
  // convergents p_k/q_k of the continued fraction of x
  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  Rational rest = from_double(x);
  for (int iter = 0; iter < 64; ++iter) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), rest.get_num_mpz_t(), rest.get_den_mpz_t());
    mpz_class p2 = a * p1 + p0;
    mpz_class q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    Rational frac = rest - Rational(a);
    if (frac == 0) break;
    rest = 1 / frac;
  }
  if (q1 == 0) return Rational(p0, q0);
  Rational r(p1, q1);
  r.canonicalize();
  return r;
}

Rational round_dyadic(const Rational& x, unsigned bits) {
  mpz_class scale = 1;
  scale <<= bits;
  Rational scaled = x * Rational(scale);
  mpz_class twice = 2 * scaled.get_num();
  twice += scaled.get_den();
  mpz_class den2 = 2 * scaled.get_den();
  mpz_class n;
  mpz_fdiv_q(n.get_mpz_t(), twice.get_mpz_t(), den2.get_mpz_t());
  Rational r(n, scale);
  r.canonicalize();
  return r;
}

Rational power(const Rational& base, unsigned e) {
  Rational r = 1;
  Rational b = base;
  while (e != 0) {
    if (e & 1U) r *= b;
    e >>= 1U;
    if (e != 0) b *= b;
  }
  return r;
}

}  // namespace gromov
