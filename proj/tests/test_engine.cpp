#include "doctest.h"

#include <cmath>
#include <random>

#include "gromov/engine.hpp"
#include "gromov/poly_parser.hpp"

using namespace gromov;

namespace {

Expr P1(const char* s) { return expr::poly(parse_poly(s, 1)); }

double ev(const Expr& e, double x) {
  std::vector<double> p{x};
  return eval(e, p);
}

double ev(const Expr& e, double x, double y) {
  std::vector<double> p{x, y};
  return eval(e, p);
}

void check_norms(const Resolution& res, double tol = 1e-9) {
  for (const auto& c : res.charts) {
    REQUIRE(c.norm.has_value());
    CHECK(c.norm->converged);
    CHECK(c.norm->norm <= 1.0 + tol);
    for (const auto& n : c.composite_norms) CHECK(n.norm <= 1.0 + tol);
  }
}

}  // namespace

TEST_CASE("c1 split of x^2 at 1/2") {
  auto res = resolve_interval_c1(P1("x1^2"), 0, 1);
  REQUIRE(res.count() == 2);
  check_norms(res);
  // affine piece on (0, 1/2), inverse on (1/2, 1)
  CHECK(ev(res.charts[0].chart.components[0], 1.0) == doctest::Approx(0.5));
  CHECK(ev(res.charts[1].chart.components[0], 0.0) == doctest::Approx(0.5));
  CHECK(ev(res.charts[1].chart.components[0], 0.5) == doctest::Approx(std::sqrt(0.625)));
}

TEST_CASE("constant and identity give one chart") {
  auto c = resolve_interval_c1(expr::constant(ratio(1, 3)), 0, 1);
  CHECK(c.count() == 1);
  check_norms(c);
  auto id = resolve_interval_cr(expr::var(0), 0, 1, 3);
  CHECK(id.count() == 1);
  check_norms(id);
}

TEST_CASE("order 2 resolution of x^2") {
  EngineTrace tr;
  auto res = resolve_interval_cr(P1("x1^2"), 0, 1, 2, {}, &tr);
  CHECK(res.count() >= 2);
  check_norms(res);
  // charts cover the interval up to measure zero
  double total = 0;
  for (const auto& c : res.charts) {
    double a = ev(c.chart.components[0], 0.0), b = ev(c.chart.components[0], 1.0);
    total += std::abs(b - a);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("subinterval resolution stays inside") {
  auto res = resolve_interval_cr(P1("4*x1^3 - 3*x1"), ratio(1, 4), ratio(3, 4), 2);
  check_norms(res);
  for (const auto& c : res.charts)
    for (double t : {0.0, 0.3, 1.0}) {
      double x = ev(c.chart.components[0], t);
      CHECK(x >= 0.25 - 1e-12);
      CHECK(x <= 0.75 + 1e-12);
    }
}

TEST_CASE("bad inputs") {
  CHECK_THROWS_AS(resolve_interval_cr(P1("x1"), 1, 0, 1), EngineError);
  CHECK_THROWS_AS(resolve_interval_cr(P1("x1"), 0, 1, 0), EngineError);
}

TEST_CASE("order 3 of a cubic with interior extrema") {
  auto res = resolve_interval_cr(P1("2*x1^3 - (3/2)*x1 + (1/2)"), 0, 1, 3);
  MESSAGE("charts: " << res.count() << " max degree " << res.max_degree());
  check_norms(res);
}

namespace {

Presentation pres(std::size_t d, std::vector<std::pair<const char*, Relation>> conds,
                  unsigned n = 1) {
  Presentation p;
  p.vars = d;
  p.box_n = n;
  std::vector<SignCondition> conj;
  for (auto [s, r] : conds) conj.push_back({parse_poly(s, d), r});
  p.disjuncts.push_back(conj);
  return p;
}

}  // namespace

TEST_CASE("cells of the unit square are the identity") {
  auto p = pres(2, {{"1", Relation::Greater}});
  auto res = cells_resolution(p);
  REQUIRE(res.count() == 1);
  const auto& ch = res.charts[0].chart;
  CHECK(ch.source_dim == 2);
  CHECK(ch.components[0]->kind == NodeKind::Var);
  CHECK(ch.components[1]->kind == NodeKind::Var);
  CHECK(ch.components[0]->index == 0);
  CHECK(ch.components[1]->index == 1);
}

TEST_CASE("cells of the quarter disk") {
  auto p = pres(2, {{"x1^2 + x2^2 - 1", Relation::Less}});
  auto res = cells_resolution(p);
  REQUIRE(res.count() == 1);
  const auto& ch = res.charts[0].chart;
  CHECK(ch.triangular());
  for (double t : {0.1, 0.5, 0.9})
    for (double y : {0.2, 0.7}) {
      CHECK(ev(ch.components[0], t, y) == doctest::Approx(t * std::sqrt(1 - y * y)));
      CHECK(ev(ch.components[1], t, y) == doctest::Approx(y));
    }
  CHECK(res.charts[0].extends_continuously);
}

TEST_CASE("cells of the diagonal") {
  auto p = pres(2, {{"x1 - x2", Relation::Equal}});
  auto res = cells_resolution(p);
  REQUIRE(res.count() == 1);
  const auto& ch = res.charts[0].chart;
  CHECK(ch.source_dim == 1);
  for (double y : {0.1, 0.6}) {
    CHECK(ev(ch.components[0], y) == doctest::Approx(y));
    CHECK(ev(ch.components[1], y) == doctest::Approx(y));
  }
}

TEST_CASE("cells cover random points of a two-piece set") {
  auto p = pres(2, {{"x1^2 - x2", Relation::Greater}});
  p.disjuncts.push_back({{parse_poly("x1 + x2 - (1/2)", 2), Relation::Less}});
  auto res = cells_resolution(p);
  CHECK(res.count() >= 2);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.001, 0.999);
  for (const auto& c : res.charts) {
    for (int k = 0; k < 20; ++k) {
      std::vector<double> t;
      for (std::size_t i = 0; i < c.chart.source_dim; ++i) t.push_back(u(rng));
      auto x = c.chart(t);
      // image lies in the set (closure tolerance for sections)
      CHECK((p.contains(std::span<const double>(x)) || c.chart.source_dim < 2));
    }
  }
}

TEST_CASE("cells in one variable") {
  auto p = pres(1, {{"x1 - (1/3)", Relation::Greater}});
  auto res = cells_resolution(p);
  REQUIRE(res.count() == 1);
  CHECK(ev(res.charts[0].chart.components[0], 0.0) == doctest::Approx(1.0 / 3));
  auto q = pres(1, {{"x1^2 - (1/2)", Relation::Equal}});
  auto rq = cells_resolution(q);
  REQUIRE(rq.count() == 1);
  CHECK(rq.charts[0].chart.source_dim == 0);
}

TEST_CASE("first-derivative split examples") {
  auto y = split_by_first_derivative(parse_poly("x2", 2), 1);
  CHECK(y.plus.empty());
  CHECK(y.minus.count() == 1);
  auto half = split_by_first_derivative(parse_poly("(1/2)*x1", 2), 1);
  CHECK(half.plus.empty());

  auto sq = split_by_first_derivative(parse_poly("x1^2", 2), 1);
  REQUIRE(sq.plus.size() == 1);
  const auto& job = sq.plus[0];
  for (double t : {0.3, 0.49, 0.8})
    for (double u : {0.2, 0.7}) {
      CHECK(ev(job.phi.components[0], t, u) == doctest::Approx(std::sqrt(t)));
      CHECK(ev(job.phi.components[1], t, u) == doctest::Approx(u));
    }
  // f o chart equals the first domain coordinate exactly
  double worst = 0;
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) {
      std::vector<double> st{(i + 0.5) / 50, (j + 0.5) / 50};
      auto x = job.chart(st);
      auto t = job.domain(st);
      worst = std::max(worst, std::abs(x[0] * x[0] - t[0]));
    }
  CHECK(worst < 1e-10);
  // d/dt phi_1 = 1 / (2 sqrt t) <= 1 on t > 1/4
  std::vector<Expr> c{job.phi.components[0]};
  for (double t : {0.26, 0.5, 0.99}) {
    std::vector<double> pt{t, 0.5};
    auto j = eval_jets(c, pt, 1);
    CHECK(j[0].derivative({1, 0}) == doctest::Approx(0.5 / std::sqrt(t)));
    CHECK(std::abs(j[0].derivative({1, 0})) <= 1.0);
  }
  CHECK(sq.minus.count() >= 1);
}

TEST_CASE("square substitution on the unit strip") {
  SliceJob job{expr::constant(Rational(0)), expr::constant(Rational(1)), expr::var(0)};
  auto r = square_substitution_step(job, 1);
  REQUIRE(r.charts.size() == 1);
  CHECK(ev(r.charts[0].components[0], 0.3, 0.6) == doctest::Approx(0.09));
  CHECK(ev(r.charts[0].components[1], 0.3, 0.6) == doctest::Approx(0.6));
  CHECK(r.bound[0] == doctest::Approx(2.0));
  CHECK(r.psi_norm[0] <= 2.0 + 1e-9);
  check_norms(r.resolution, 1e-6);
}

TEST_CASE("next derivative step") {
  auto r = next_derivative_step(parse_poly("x1*x2", 2), MultiIndex{1, 0}, 4);
  CHECK(r.next == MultiIndex{0, 1});
  CHECK(r.b_n == ratio(1, 2));
  REQUIRE(r.charts.size() == 1);
  CHECK(ev(r.charts[0].components[0], 0.0, 0.5) == doctest::Approx(0.25));
  CHECK(ev(r.charts[0].components[0], 1.0, 0.5) == doctest::Approx(0.75));
  check_norms(r.resolution, 1e-6);

  auto q = next_derivative_step(parse_poly("(x1 - (1/2))^2*x2", 2), MultiIndex{1, 0}, 4);
  bool found = false;
  for (const auto& c : q.candidates)
    if (c.origin == "critical") found = std::abs(ev(c.sigma, 0.4) - 0.5) < 1e-12;
  CHECK(found);
  CHECK_THROWS_AS(next_derivative_step(parse_poly("x1", 2), MultiIndex{0, 1}, 4), EngineError);
}

TEST_CASE("epsilon resolution of the box") {
  auto p = pres(2, {{"1", Relation::Greater}});
  auto res = epsilon_resolution(p, MultiIndex{1, 0}, 10);
  REQUIRE(res.count() == 1);
  check_norms(res, 1e-6);
  CHECK(res.density <= std::sqrt(2.0) / 10 + 1e-15);
  CHECK(ev(res.charts[0].chart.components[0], 0.0, 0.0) == doctest::Approx(0.1));
  CHECK(ev(res.charts[0].chart.components[1], 1.0, 1.0) == doctest::Approx(0.9));
}

TEST_CASE("epsilon resolution of a sector with a function") {
  auto p = pres(2, {{"x1", Relation::Greater}, {"x2 - x1", Relation::Greater}});
  auto res = epsilon_resolution(p, MultiIndex{1, 0}, 1, {expr::var(0)});
  REQUIRE(res.count() == 1);
  check_norms(res, 1e-6);
  CHECK(ev(res.charts[0].chart.components[0], 0.5, 0.4) == doctest::Approx(0.2));
  CHECK(ev(res.charts[0].chart.components[1], 0.5, 0.4) == doctest::Approx(0.4));
}

TEST_CASE("epsilon resolution of the disk") {
  auto p = pres(2, {{"x1^2 + x2^2 - 1", Relation::Less}});
  auto res = epsilon_resolution(p, MultiIndex{0, 2}, 20);
  MESSAGE("disk charts " << res.count() << " max degree " << res.max_degree());
  CHECK(res.count() >= 1);
  check_norms(res, 1e-6);
}

TEST_CASE("monotone pieces satisfy x |g^(r)(x)| <= 2") {
  EngineTrace tr;
  resolve_interval_cr(P1("(1/2)*x1^4 + (1/3)*x1^3 - (1/4)*x1 + (1/4)"), 0, 1, 3, {}, &tr);
  REQUIRE(!tr.pieces.empty());
  for (const auto& p : tr.pieces) {
    Expr g = p.oriented();
    double worst = 0;
    for (int k = 1; k <= 1000; ++k) {
      double x = k / 1000.0;
      std::vector<double> pt{x};
      auto j = eval_jets(std::span<const Expr>(&g, 1), pt, p.r);
      worst = std::max(worst, x * std::abs(j[0].derivative({p.r})));
    }
    CHECK(worst <= 2.0 + 1e-9);
  }
}

TEST_CASE("inverse charts compose to exact affine maps") {
  EngineTrace tr;
  resolve_interval_cr(P1("(9/10)*x1^3 + (1/20)"), 0, 1, 2, {}, &tr);
  REQUIRE(!tr.inverses.empty());
  for (const auto& inv : tr.inverses) {
    Expr comp = expr::compose(inv.f, {inv.chart});
    for (int k = 0; k < 50; ++k) {
      double t = (k + 0.5) / 50;
      double want = Rational(inv.v0 + (inv.v1 - inv.v0) * Rational(t)).get_d();
      CHECK(std::abs(ev(comp, t) - want) < 1e-10);
    }
  }
}

TEST_CASE("chart limit raises a structured error") {
  EngineConfig cfg;
  cfg.max_charts = 1;
  try {
    resolve_interval_cr(P1("(1/2)*x1^4 + (1/3)*x1^3 - (1/4)*x1 + (1/4)"), 0, 1, 3, cfg);
    FAIL("expected an engine error");
  } catch (const EngineError& e) {
    CHECK(e.diagnostics().contains("limit"));
  }
}
