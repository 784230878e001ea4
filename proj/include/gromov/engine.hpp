#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gromov/charts.hpp"
#include "gromov/semialg.hpp"

namespace gromov {

/// Engine failure carrying whatever was built before it stopped.
class EngineError : public std::runtime_error {
 public:
  explicit EngineError(const std::string& msg, json diagnostics = json::object())
      : std::runtime_error(msg), diagnostics_(std::move(diagnostics)) {}
  const json& diagnostics() const { return diagnostics_; }

 private:
  json diagnostics_;
};

struct EngineConfig {
  NormPolicy norm;
  double rescale_margin = 1e-6;  // rescale by ceil(K (1 + margin))
  std::size_t max_charts = 20000;
  unsigned root_grid = 1024;     // sampling for derivative roots of non-polynomial maps
  bool record_norms = true;      // measure and store final NormReports
};

/// One oriented monotone piece of an order-r step: h o lambda with
/// lambda(x) = c + (d - c) x, or d - (d - c) x when flipped.
struct MonotonePiece {
  Expr h;
  Rational c, d;
  bool flipped = false;
  unsigned r = 0;
  Expr oriented() const;
};

/// A 1-D inverse chart: f o chart = v0 + t (v1 - v0) exactly.
struct InverseRecord {
  Expr f;
  Expr chart;
  Rational v0, v1;
};

/// Optional side output used by the verifier and the acceptance harness.
struct EngineTrace {
  std::vector<MonotonePiece> pieces;
  std::vector<InverseRecord> inverses;
};

/// A 1-D chart with the composites of the family it resolves.
struct FamilyPiece {
  Expr chart;                // over one variable, into (0,1)
  std::vector<Expr> comps;   // f_j o chart
  std::string provenance = "c1-split";
};

// ---- dimension 1 -------------------------------------------------------

/// Charts psi with ||psi||_1 <= 1 and ||f o psi||_1 <= 1 for a map f: (0,1) -> (0,1).
std::vector<FamilyPiece> c1_pieces(const Expr& f, const EngineConfig& cfg = {},
                                   EngineTrace* trace = nullptr);
/// Charts resolving every map of the family at order r (orders nested one at a time).
std::vector<FamilyPiece> resolve_family(const std::vector<Expr>& fs, unsigned r,
                                        const EngineConfig& cfg = {}, EngineTrace* trace = nullptr);

Resolution resolve_interval_c1(const Expr& f, const Rational& a, const Rational& b,
                               const EngineConfig& cfg = {}, EngineTrace* trace = nullptr);
Resolution resolve_interval_cr(const Expr& f, const Rational& a, const Rational& b, unsigned r,
                               const EngineConfig& cfg = {}, EngineTrace* trace = nullptr);

// ---- cells -------------------------------------------------------------

/// Triangular Nash charts, one per slice of the set; no norm control.
Resolution cells_resolution(const Presentation& pres);

/// Expression of a CAD branch over a base expression y.
Expr branch_expr(const NashBranch& b, const Expr& y);

// ---- dimension 2 steps -------------------------------------------------

/// Inverse chart on one sector of A+ = {|d f / d x1| > 1}: phi(t,u) = (f(., u)^-1(t), u).
struct InverseJob {
  Expr f;                 // over (x1, x2)
  TriangularChart phi;    // over (t, u)
  TriangularChart domain; // unit square onto D+ = g(sector), g(x1,y) = (f(x1,y), y)
  TriangularChart chart;  // phi o domain
};

struct FirstDerivativeSplit {
  Resolution minus;                // cells of A- (|d f/d x1| <= 1)
  std::vector<InverseJob> plus;    // sectors of A+
};

FirstDerivativeSplit split_by_first_derivative(const MultiPoly& f, unsigned n,
                                               const EngineConfig& cfg = {});

/// Sector data: lower zeta and upper eta over the base (0,1), and the function.
struct SliceJob {
  Expr zeta, eta;  // one variable
  Expr f;          // over (x1, x2)
};

struct SquareStepResult {
  std::vector<TriangularChart> charts;  // psi before rescale
  std::vector<double> bound;            // sup |d^{s+1}_{v1} (f o psi)| per chart
  std::vector<double> psi_norm;         // ||psi||_{s+1} before rescale
  Resolution resolution;                // rescaled to norm 1
};

SquareStepResult square_substitution_step(const SliceJob& job, unsigned s,
                                          const EngineConfig& cfg = {});

struct ArgmaxCandidate {
  Expr base;               // y = base(s), s in (0,1)
  Expr sigma;              // x1 = sigma(s)
  std::string origin;      // "critical" or "boundary"
};

struct NextDerivativeResult {
  MultiIndex next;                         // alpha + 1
  std::vector<ArgmaxCandidate> candidates;
  Rational b_n;
  std::vector<TriangularChart> charts;     // (1/n + b_n x1, h(y)) before rescale
  std::vector<double> bound;               // sup |d^{alpha+1}(f o chart)|
  Resolution resolution;
};

NextDerivativeResult next_derivative_step(const MultiPoly& f, const MultiIndex& alpha, unsigned n,
                                          const EngineConfig& cfg = {});

// ---- driver ------------------------------------------------------------

/// Resolution of the target restricted to (1/n, 1 - 1/n)^d at order alpha.
/// With functions, every composite is rescaled to norm 1 as well.
Resolution epsilon_resolution(const Presentation& target, const MultiIndex& alpha, unsigned n,
                              const std::vector<Expr>& functions = {},
                              const EngineConfig& cfg = {});

}  // namespace gromov
