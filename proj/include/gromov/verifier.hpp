#pragma once

#include <string>
#include <vector>

#include "gromov/charts.hpp"
#include "gromov/engine.hpp"
#include "gromov/semialg.hpp"

namespace gromov {

struct GateResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;   // worst value seen
  double threshold = 0.0;  // pass iff measured <= threshold (and flags hold)
  json details = json::object();
};

struct VerificationReport {
  std::vector<GateResult> gates;
  double wall_ms = 0.0;
  unsigned long seed = 0;
  bool pass() const;
  void merge(const VerificationReport& other);
};

json to_json(const VerificationReport& r);

/// Distance of target samples to the union of chart images. A sample fails
/// when it lies farther than density + tol from every image. tol < 0 uses
/// the resolution's coverage_tol.
VerificationReport check_coverage(const Resolution& res, const Presentation& target,
                                  std::size_t samples = 10000, double tol = -1.0,
                                  unsigned long seed = 1);

/// Fresh norm estimates of every chart and composite against 1 + tol.
VerificationReport check_norms(const Resolution& res, double tol = 1e-6,
                               const NormPolicy& policy = {});

/// Constant sign vectors over exact samples of every slice.
VerificationReport check_sign_invariance(const Decomposition& decomp,
                                         const std::vector<MultiPoly>& polys,
                                         std::size_t samples = 100);

/// x |g^(r)(x)| <= 2 + tol on a grid for an oriented monotone piece g.
VerificationReport check_estimate_eq1(const Expr& g, unsigned r, double tol = 1e-9,
                                      unsigned grid = 1000);
VerificationReport check_estimate_eq1(const MonotonePiece& piece, double tol = 1e-9,
                                      unsigned grid = 1000);

/// |x1 - zeta(y)| |d^{s+1}_{x1} f(x1, y)| <= 2 + tol on a grid over the
/// sector zeta(y) < x1 < 1.
VerificationReport check_sector_estimate(const Expr& f, const Expr& zeta, unsigned s,
                                      double tol = 1e-9, unsigned grid = 100);

struct ExperimentConfig {
  unsigned degree = 2;
  unsigned order = 1;
  std::vector<double> buckets{1e0, 1e3, 1e6};
  unsigned runs = 30;
  unsigned long seed = 7;
  std::size_t dim = 1;
  /// Same unit draw scaled into every bucket (common random numbers).
  bool paired = true;
};

struct ExperimentRow {
  unsigned long seed = 0;
  unsigned degree = 0;
  unsigned order = 0;
  double bucket = 0.0;
  unsigned run = 0;
  std::size_t N = 0;  // 0 when the engine failed
  unsigned max_chart_degree = 0;
  double wall_ms = 0.0;
  std::string error;
};

struct ExperimentResult {
  VerificationReport report;
  std::vector<ExperimentRow> rows;
};

/// Random degree-d inputs per coefficient-magnitude bucket, squashed into
/// (0,1); passes iff the maximum chart count agrees across buckets.
ExperimentResult degree_robustness_experiment(const ExperimentConfig& cfg,
                                              const EngineConfig& engine = {});

/// seed,degree,order,bucket,run,N,max_chart_degree,wall_ms
std::string experiment_csv(const std::vector<ExperimentRow>& rows);

/// The exact squash (1 + p / (1 + B)) / 2 with B the sum of |coefficients|.
MultiPoly squash_unit(const MultiPoly& p);

/// Coverage and norm gates together.
VerificationReport verify_resolution(const Resolution& res, const Presentation& target,
                                     std::size_t samples = 10000, unsigned long seed = 1);

}  // namespace gromov
