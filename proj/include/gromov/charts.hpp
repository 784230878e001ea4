#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gromov/chart_expr.hpp"
#include "gromov/multi_index.hpp"

namespace gromov {

using json = nlohmann::json;

/// Map (0,1)^l -> (0,1)^d whose component i (0-based) only reads variables
/// j >= max(0, i - (d - l)).
struct TriangularChart {
  std::size_t source_dim = 0;
  std::size_t target_dim = 0;
  std::vector<Expr> components;

  TriangularChart() = default;
  /// Validates arity and the triangular support pattern.
  TriangularChart(std::size_t l, std::vector<Expr> comps);

  static TriangularChart identity(std::size_t d);
  /// t_i -> lo_i + (hi_i - lo_i) t_i.
  static TriangularChart affine_box(const std::vector<Rational>& lo, const std::vector<Rational>& hi);

  bool triangular() const;
  unsigned degree() const;
  std::vector<double> operator()(std::span<const double> t) const;
};

/// outer o inner; requires inner.target_dim == outer.source_dim.
TriangularChart compose(const TriangularChart& outer, const TriangularChart& inner);

/// Derivatives d^beta of every component for all beta <= alpha.
struct JetTable {
  bool exact = false;
  std::vector<MultiIndex> betas;
  std::vector<std::vector<double>> values;          // [component][beta]
  std::vector<std::vector<Rational>> exact_values;  // filled when exact
};

/// Exact when every node is rational at the point, double jets otherwise.
JetTable jet_eval(const TriangularChart& chart, std::span<const Rational> point,
                  const MultiIndex& alpha);
JetTable jet_eval(std::span<const Expr> components, std::span<const Rational> point,
                  const MultiIndex& alpha);

struct NormPolicy {
  unsigned initial_grid = 0;  // intervals per axis; 0 picks by dimension
  unsigned max_grid = 0;
  double tolerance = 1e-4;    // relative change that counts as converged
  double boundary_offset = 1e-14;  // floor for the 1/m^3 boundary rows
};

struct NormReport {
  MultiIndex alpha;
  std::vector<MultiIndex> betas;
  std::vector<double> sup;        // per beta, max over components
  double norm = 0.0;              // max over all beta
  double derivative_norm = 0.0;   // max over |beta| >= 1
  std::vector<std::pair<unsigned, double>> history;  // (grid, norm)
  unsigned grid = 0;
  bool converged = false;
  double tolerance = 0.0;
};

/// alpha for a chart with l source variables: alpha itself when the length
/// matches, otherwise (0, ..., 0, |alpha|) in N^l.
MultiIndex alpha_for_dim(const MultiIndex& alpha, std::size_t l);

/// Grid sup of |d^beta e| over (0,1)^l for all beta <= alpha, refined by
/// doubling until successive maxima agree. Throws EvalError when a grid
/// point cannot be evaluated.
NormReport norm_estimate(std::span<const Expr> components, std::size_t l, const MultiIndex& alpha,
                         const NormPolicy& policy = {});
NormReport norm_estimate(const TriangularChart& chart, const MultiIndex& alpha,
                         const NormPolicy& policy = {});

/// Numerical check that components have limits at the cube boundary.
bool extends_continuously(std::span<const Expr> components, std::size_t l);

/// ceil(K) for the derivative part of a report; throws ChartError when the
/// report did not converge or K is not finite.
unsigned rescale_factor(const NormReport& report);
unsigned rescale_factor(double K);
/// The pieces^l affine charts t -> (t + k) / pieces tiling (0,1)^l.
std::vector<TriangularChart> affine_tiling(std::size_t l, unsigned pieces);

struct ChartRecord {
  TriangularChart chart;
  std::string provenance;  // c1-split, inverse, square-subst, argmax, cell, rescale
  unsigned degree = 1;
  std::optional<NormReport> norm;
  std::vector<NormReport> composite_norms;  // one per resolved function
  bool extends_continuously = true;
};

/// A finite family of triangular charts covering a set (and bounding the
/// composites with `functions` when present).
struct Resolution {
  std::size_t dim = 1;
  MultiIndex alpha;
  std::vector<Rational> domain_lo;  // covered box, per coordinate
  std::vector<Rational> domain_hi;
  std::vector<Expr> functions;      // over dim variables
  std::vector<ChartRecord> charts;
  double coverage_tol = 1e-6;
  unsigned shrink_n = 0;            // 0: no box shrink
  double density = 0.0;             // a_n

  std::size_t count() const { return charts.size(); }
  unsigned max_degree() const;
  /// Largest recorded norm over charts and composites (0 when none).
  double max_recorded_norm() const;
};

/// Rescale by tiling: ceil(K)^l affine charts with ||f o lambda||_alpha <= 1.
Resolution rescale_to_unit(const Expr& f, std::size_t l, const NormReport& report,
                           const NormPolicy& policy = {});

json to_json(const MultiIndex& m);
MultiIndex multi_index_from_json(const json& j);
json to_json(const NormReport& r);
NormReport norm_report_from_json(const json& j);
json to_json(const Resolution& r);
Resolution resolution_from_json(const json& j);

/// Node table for a set of roots; ids follow a deterministic post-order.
json exprs_to_json(std::span<const Expr> roots, std::vector<std::size_t>& root_ids);
std::vector<Expr> exprs_from_json(const json& nodes);

}  // namespace gromov
