#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gromov/algebraic.hpp"
#include "gromov/multipoly.hpp"

namespace gromov {

using json = nlohmann::json;

enum class Relation { Greater, Less, Equal };

std::string relation_symbol(Relation r);
Relation parse_relation(const std::string& s);

struct SignCondition {
  MultiPoly poly;
  Relation rel = Relation::Greater;
  bool holds(int sign) const;
};

/// Union (outer list) of intersections (inner lists) of sign conditions,
/// restricted to the box (1/n, 1 - 1/n)^d, or (0, 1)^d when n = 1.
struct Presentation {
  std::size_t vars = 0;
  unsigned box_n = 1;
  std::vector<std::vector<SignCondition>> disjuncts;

  Rational box_lo() const;
  Rational box_hi() const;
  /// Distinct polynomials in order of first appearance.
  std::vector<MultiPoly> polynomials() const;
  /// Membership given the signs of polynomials() (box not checked).
  bool satisfied_by(std::span<const int> signs) const;
  /// Exact membership including the open box.
  bool contains(std::span<const Rational> x) const;
  bool contains(std::span<const double> x) const;
  /// Same set on the shrunken box (1/n, 1 - 1/n)^d.
  Presentation shrunk(unsigned n) const;
};

class PresentationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sum of total degrees over all polynomial occurrences.
std::size_t presentation_degree(const Presentation& pres);

json to_json(const Presentation& pres);
Presentation presentation_from_json(const json& j);

/// Piece of a line: an open interval between two algebraic endpoints or a
/// single algebraic point.
struct BaseCell {
  enum class Kind { Open, Point };
  Kind kind = Kind::Open;
  AlgebraicNumber lo;
  AlgebraicNumber hi;  // equals lo for a point

  bool is_point() const { return kind == Kind::Point; }
  const AlgebraicNumber& point() const { return lo; }
  /// Rational interior sample of an open cell (exact value for rational points).
  Rational sample() const;
  /// `count` rational points spread over an open cell.
  std::vector<Rational> samples(std::size_t count) const;
  bool contains(const Rational& y) const;
  double lo_d() const { return lo.to_double(); }
  double hi_d() const { return hi.to_double(); }
};

class DegenerateCellError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BranchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The root_index-th (1-based) real root of fiber(., y) inside the fiber
/// window (window_lo, window_hi), as a function of y over `base`.
/// fiber has two variables: x1 (fiber) and x2 (base).
struct NashBranch {
  MultiPoly fiber;
  unsigned root_index = 1;
  Rational window_lo;
  Rational window_hi;
  BaseCell base;
  std::size_t basis_index = 0;

  /// Exact branch value at a rational base point.
  AlgebraicNumber value_at(const Rational& y) const;
  /// Value at an algebraic base point (root located by exact elimination,
  /// vanishing confirmed by refinement).
  AlgebraicNumber value_at(const AlgebraicNumber& y) const;
  double value_at(double y) const;
};

struct BranchJet {
  bool exact = false;
  std::vector<Rational> exact_values;  // filled when exact
  std::vector<double> values;          // zeta, zeta', ..., zeta^(order)
};

/// Value and derivatives of a branch by implicit differentiation of
/// fiber(zeta(y), y) = 0.
BranchJet branch_eval(const NashBranch& branch, const Rational& y, unsigned order);

enum class SliceKind { Sector, Section };

/// Sector: between fiber positions lower and lower + 1; section: the graph of
/// the branch at position lower (= upper). Position 0 is the box bottom,
/// position q + 1 the box top, 1..q the sorted branches of the cell.
/// For one-variable decompositions the slice is the base cell itself.
struct Slice {
  std::size_t id = 0;  // index in Decomposition::slices
  SliceKind kind = SliceKind::Sector;
  std::size_t cell = 0;
  std::size_t lower = 0;
  std::size_t upper = 0;
  std::vector<int> signs;  // per decomposition input
  unsigned dimension = 0;
};

struct Decomposition {
  std::size_t dim = 1;
  Rational box_lo;
  Rational box_hi;
  std::vector<MultiPoly> inputs;
  /// Pairwise coprime square-free factors of the inputs.
  std::vector<MultiPoly> basis;
  /// Base-variable polynomials whose roots split the base line (d = 2).
  std::vector<MultiPoly> projection;
  std::vector<BaseCell> cells;
  std::vector<std::vector<NashBranch>> branches;  // per cell, sorted (d = 2)
  std::vector<Slice> slices;                       // every slice, with signs
  unsigned max_input_degree = 0;
  unsigned max_projection_degree = 0;

  /// First slice of each cell; within a cell slices alternate
  /// sector 0, section 1, sector 1, ..., sector q (one slice when d = 1).
  std::vector<std::size_t> cell_slice_start;

  struct Fiber {
    std::size_t cell = 0;
    std::vector<AlgebraicNumber> values;  // sorted branch values
  };
  /// Cell and exact branch values over a rational base point (d = 2).
  Fiber fiber_at(const Rational& y) const;
  /// Slice of a point (x, y) given the fiber over y.
  std::size_t slice_at(const Fiber& fiber, const Rational& x) const;
  /// Locates the slice containing a rational point of the open box.
  std::size_t locate(std::span<const Rational> x) const;
  std::size_t cell_of(const Rational& y) const;
  /// Rational sample points inside a slice (exact coordinates).
  /// Slices over irrational points or sections with irrational fiber
  /// values have no rational points; the result is then empty.
  std::vector<std::vector<Rational>> rational_samples(std::size_t slice, std::size_t count) const;
  std::size_t branch_count(std::size_t cell) const { return dim == 2 ? branches[cell].size() : 0; }
};

/// Sign-invariant pieces of an interval for univariate polynomials in x1.
Decomposition cad_line(const std::vector<MultiPoly>& polys, const Interval& range);

/// Cylindrical decomposition of the square (lo, hi)^2 with fiber x1 and base x2.
Decomposition cad_plane(const std::vector<MultiPoly>& polys, const Rational& lo,
                        const Rational& hi);

/// Decomposition of the presentation's own polynomials over its box.
Decomposition decompose(const Presentation& pres);

/// The slices (with signs) whose sign vector satisfies the presentation.
std::vector<Slice> slices_of(const Presentation& pres, const Decomposition& decomp);

/// Top dimension of the set, -1 for the empty set.
int max_dimension(const Presentation& pres);

json to_json(const Decomposition& d);
json to_json(const BaseCell& c);
json to_json(const AlgebraicNumber& a);
AlgebraicNumber algebraic_from_json(const json& j);

}  // namespace gromov
