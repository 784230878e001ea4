#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gromov {

/// Element of N^d with the graded order: lower weight first, equal weights
/// compared at the last differing coordinate.
struct MultiIndex {
  std::vector<unsigned> e;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<unsigned> v) : e(std::move(v)) {}
  MultiIndex(std::initializer_list<unsigned> v) : e(v) {}

  std::size_t size() const { return e.size(); }
  unsigned weight() const;
  unsigned operator[](std::size_t i) const { return e[i]; }
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  std::string to_string() const;
};

/// a precedes or equals b; throws std::invalid_argument on length mismatch.
bool mi_leq(const MultiIndex& a, const MultiIndex& b);
/// Least element strictly above a.
MultiIndex mi_succ(const MultiIndex& a);
/// All beta with beta <= alpha, in increasing order.
std::vector<MultiIndex> mi_all_below(const MultiIndex& alpha);
/// (0, ..., 0, r) in N^d.
MultiIndex mi_top(std::size_t d, unsigned r);
/// Parses "0,2" style comma lists.
MultiIndex parse_multi_index(const std::string& s);

}  // namespace gromov
