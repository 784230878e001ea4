#include "gromov/jet.hpp"

#include <mutex>

namespace gromov {

namespace {

void enumerate(std::size_t nvars, unsigned degree, std::size_t pos, Exponents& cur,
               std::vector<Exponents>& out) {
  if (pos + 1 == nvars) {
    cur[pos] = degree;
    out.push_back(cur);
    return;
  }
  for (unsigned k = degree + 1; k-- > 0;) {
    cur[pos] = k;
    enumerate(nvars, degree - k, pos + 1, cur, out);
  }
}

std::shared_ptr<const JetLayout> build(std::size_t nvars, unsigned order) {
  auto L = std::make_shared<JetLayout>();
  L->nvars = nvars;
  L->order = order;
  if (nvars == 0) {
    L->monomials.push_back({});
  } else {
    for (unsigned d = 0; d <= order; ++d) {
      Exponents cur(nvars, 0);
      enumerate(nvars, d, 0, cur, L->monomials);
    }
  }
  for (std::size_t i = 0; i < L->monomials.size(); ++i) L->index[L->monomials[i]] = i;
  L->products.resize(L->monomials.size());
  for (std::size_t i = 0; i < L->monomials.size(); ++i) {
    for (std::size_t j = 0; j < L->monomials.size(); ++j) {
      Exponents s(nvars);
      unsigned tot = 0;
      for (std::size_t v = 0; v < nvars; ++v) {
        s[v] = L->monomials[i][v] + L->monomials[j][v];
        tot += s[v];
      }
      if (tot <= order) L->products[i].emplace_back(j, L->index.at(s));
    }
  }
  for (const auto& e : L->monomials) {
    Rational f = 1;
    for (unsigned k : e)
      for (unsigned m = 2; m <= k; ++m) f *= m;
    L->factorial_exact.push_back(f);
    L->factorial.push_back(f.get_d());
  }
  return L;
}

}  // namespace

std::shared_ptr<const JetLayout> JetLayout::get(std::size_t nvars, unsigned order) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, unsigned>, std::shared_ptr<const JetLayout>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{nvars, order}];
  if (!slot) slot = build(nvars, order);
  return slot;
}

std::size_t JetLayout::at(const Exponents& e) const {
  auto it = index.find(e);
  if (it == index.end()) throw std::out_of_range("multi-index above the jet order");
  return it->second;
}

}  // namespace gromov
