#include "gromov/multi_index.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace gromov {

unsigned MultiIndex::weight() const { return std::accumulate(e.begin(), e.end(), 0U); }

std::string MultiIndex::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(e[i]);
  }
  return s;
}

bool mi_leq(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size()) throw std::invalid_argument("multi-index length mismatch");
  unsigned wa = a.weight(), wb = b.weight();
  if (wa != wb) return wa < wb;
  for (std::size_t k = a.size(); k-- > 0;)
    if (a[k] != b[k]) return a[k] < b[k];
  return true;
}

namespace {

void same_weight(std::size_t d, unsigned w, std::size_t pos, std::vector<unsigned>& cur,
                 std::vector<MultiIndex>& out) {
  if (pos + 1 == d) {
    cur[pos] = w;
    out.emplace_back(cur);
    return;
  }
  for (unsigned k = 0; k <= w; ++k) {
    cur[pos] = k;
    same_weight(d, w - k, pos + 1, cur, out);
  }
}

std::vector<MultiIndex> weight_class(std::size_t d, unsigned w) {
  std::vector<MultiIndex> out;
  if (d == 0) return out;
  std::vector<unsigned> cur(d, 0);
  same_weight(d, w, 0, cur, out);
  std::sort(out.begin(), out.end(), [](const MultiIndex& a, const MultiIndex& b) {
    return mi_leq(a, b) && !(a == b);
  });
  return out;
}

}  // namespace

MultiIndex mi_succ(const MultiIndex& a) {
  if (a.size() == 0) throw std::invalid_argument("successor of the empty multi-index");
  auto cls = weight_class(a.size(), a.weight());
  auto it = std::find(cls.begin(), cls.end(), a);
  if (it + 1 != cls.end()) return *(it + 1);
  std::vector<unsigned> next(a.size(), 0);
  next[0] = a.weight() + 1;
  return MultiIndex(next);
}

std::vector<MultiIndex> mi_all_below(const MultiIndex& alpha) {
  std::vector<MultiIndex> out;
  for (unsigned w = 0; w <= alpha.weight(); ++w)
    for (auto& b : weight_class(alpha.size(), w))
      if (mi_leq(b, alpha)) out.push_back(b);
  if (alpha.size() == 0) out.push_back(MultiIndex{});
  return out;
}

MultiIndex mi_top(std::size_t d, unsigned r) {
  std::vector<unsigned> v(d, 0);
  if (d > 0) v.back() = r;
  return MultiIndex(v);
}

MultiIndex parse_multi_index(const std::string& s) {
  std::vector<unsigned> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(std::remove_if(tok.begin(), tok.end(), ::isspace), tok.end());
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("bad multi-index component '" + tok + "'");
    v.push_back(static_cast<unsigned>(std::stoul(tok)));
  }
  if (v.empty()) throw std::invalid_argument("empty multi-index");
  return MultiIndex(v);
}

}  // namespace gromov
