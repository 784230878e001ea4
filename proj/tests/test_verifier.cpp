#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "gromov/poly_parser.hpp"
#include "gromov/verifier.hpp"

using namespace gromov;

namespace {

Presentation box2(const char* poly = "1", Relation rel = Relation::Greater, unsigned n = 1) {
  Presentation p;
  p.vars = 2;
  p.box_n = n;
  p.disjuncts = {{{parse_poly(poly, 2), rel}}};
  return p;
}

Resolution single(TriangularChart ch, MultiIndex alpha) {
  Resolution r;
  r.dim = ch.target_dim;
  r.alpha = alpha;
  r.domain_lo.assign(r.dim, Rational(0));
  r.domain_hi.assign(r.dim, Rational(1));
  ChartRecord rec;
  rec.chart = std::move(ch);
  rec.provenance = "cell";
  r.charts.push_back(rec);
  return r;
}

}  // namespace

TEST_CASE("coverage of the unit square by the identity") {
  auto res = single(TriangularChart::identity(2), MultiIndex{1, 0});
  auto rep = check_coverage(res, box2(), 2000, 1e-9);
  CHECK(rep.pass());
  CHECK(rep.gates[0].measured <= 1e-9);
}

TEST_CASE("an empty resolution does not cover a nonempty set") {
  Resolution res;
  res.dim = 2;
  res.alpha = MultiIndex{1, 0};
  auto rep = check_coverage(res, box2(), 100, 1e-4);
  CHECK_FALSE(rep.pass());
}

TEST_CASE("half the square misses the other half") {
  auto res = single(TriangularChart::affine_box({0, 0}, {ratio(1, 2), 1}), MultiIndex{1, 0});
  auto rep = check_coverage(res, box2(), 500, 1e-4);
  CHECK_FALSE(rep.pass());
  CHECK(rep.gates[0].measured > 0.4);
}

TEST_CASE("a curve target is covered by its section chart") {
  Presentation diag = box2("x1 - x2", Relation::Equal);
  auto res = cells_resolution(diag);
  auto rep = check_coverage(res, diag, 300, 1e-6);
  CHECK(rep.pass());
}

TEST_CASE("norm gate examples") {
  auto id = single(TriangularChart::identity(1), MultiIndex{3});
  CHECK(check_norms(id).pass());
  auto twice = single(TriangularChart(1, {expr::affine(0, {Rational(2)})}), MultiIndex{1});
  auto rep = check_norms(twice);
  CHECK_FALSE(rep.pass());
  CHECK(rep.gates[0].measured == doctest::Approx(2.0));
  auto sq = resolve_interval_cr(expr::poly(parse_poly("x1^2", 1)), 0, 1, 2);
  CHECK(check_norms(sq).pass());
}

TEST_CASE("non-converged norms are flagged") {
  Expr root = expr::branch(parse_poly("x1^2 - x2", 2), {expr::var(0)}, 0, 2, 1);
  auto res = single(TriangularChart(1, {root}), MultiIndex{1});
  CHECK_FALSE(check_norms(res).pass());
}

TEST_CASE("disk resolution passes both gates") {
  Presentation disk = box2("x1^2 + x2^2 - 1", Relation::Less);
  auto res = epsilon_resolution(disk, MultiIndex{0, 2}, 20);
  auto rep = verify_resolution(res, disk, 3000, 5);
  CHECK(rep.pass());
  // without the density allowance the images still reach every sample
  Resolution strict = res;
  strict.density = 0;
  auto tight = check_coverage(strict, disk, 1000, 1e-4, 9);
  CHECK(tight.pass());
  MESSAGE("strict coverage distance " << tight.gates[0].measured);
}

TEST_CASE("sign invariance on cad examples") {
  std::vector<std::vector<MultiPoly>> inputs = {
      {parse_poly("x1^2 + x2^2 - 1", 2)},
      {parse_poly("x1 - x2", 2)},
      {parse_poly("x1*x2 - (1/4)", 2), parse_poly("x1 - (1/2)", 2)},
      {parse_poly("2*x1^2 - x2", 2)},
  };
  for (const auto& polys : inputs) {
    auto dec = cad_plane(polys, 0, 1);
    auto rep = check_sign_invariance(dec, polys, 100);
    CHECK(rep.pass());
    CHECK(rep.gates[0].details["samples_checked"].get<std::size_t>() > 0);
  }
}

TEST_CASE("estimate checks") {
  Expr half_sq = expr::poly(parse_poly("(1/2)*x1^2", 1));
  CHECK(check_estimate_eq1(half_sq, 1).pass());
  // x |g'| = 5 x^2 breaks the bound
  Expr steep = expr::poly(parse_poly("(5/2)*x1^2", 1));
  CHECK_FALSE(check_estimate_eq1(steep, 1).pass());

  Expr sqrt_x = expr::branch(parse_poly("x1^2 - x2", 3), {expr::var(0), expr::var(1)}, 0, 2, 1);
  // fiber ignores x3 (the y slot); only sqrt(x1) matters
  CHECK(check_sector_estimate(sqrt_x, expr::constant(Rational(0)), 0).pass());
  Expr quad = expr::poly(parse_poly("(1/2)*x1^2", 2));
  CHECK(check_sector_estimate(quad, expr::constant(Rational(0)), 1).pass());

  EngineTrace tr;
  resolve_interval_cr(expr::poly(parse_poly("(1/2)*x1^3 + (1/4)", 1)), 0, 1, 2, {}, &tr);
  for (const auto& p : tr.pieces) CHECK(check_estimate_eq1(p).pass());
}

TEST_CASE("affine inputs need one chart in every bucket") {
  ExperimentConfig cfg;
  cfg.degree = 1;
  cfg.order = 2;
  cfg.runs = 10;
  auto out = degree_robustness_experiment(cfg);
  CHECK(out.report.pass());
  for (const auto& r : out.rows) CHECK(r.N == 1);
  CHECK(out.rows.size() == 30);
}

TEST_CASE("quadratic experiment and csv") {
  ExperimentConfig cfg;
  cfg.degree = 2;
  cfg.order = 1;
  cfg.runs = 30;
  auto a = degree_robustness_experiment(cfg);
  CHECK(a.report.pass());
  auto b = degree_robustness_experiment(cfg);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].N == b.rows[i].N);
    CHECK(a.rows[i].bucket == b.rows[i].bucket);
  }
  std::string csv = experiment_csv(a.rows);
  CHECK(csv.rfind("seed,degree,order,bucket,run,N,max_chart_degree,wall_ms\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 91);
}

TEST_CASE("squash lands in (0,1)") {
  MultiPoly p = parse_poly("1000000*x1^3 - 999999*x1 + 5", 1);
  MultiPoly q = squash_unit(p);
  for (int k = 0; k <= 100; ++k) {
    std::vector<Rational> x{ratio(k, 100)};
    Rational v = q.evaluate(x);
    CHECK(v > 0);
    CHECK(v < 1);
  }
}

TEST_CASE("bad experiment configs") {
  ExperimentConfig cfg;
  cfg.buckets.clear();
  CHECK_THROWS(degree_robustness_experiment(cfg));
  ExperimentConfig c2;
  c2.order = 0;
  CHECK_THROWS(degree_robustness_experiment(c2));
}
