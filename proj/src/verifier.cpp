#include "gromov/verifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <unordered_map>

#include "gromov/parallel.hpp"
#include "gromov/upoly.hpp"

namespace gromov {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double clamp_open(double t) { return std::clamp(t, 1e-12, 1.0 - 1e-12); }

struct ImagePoint {
  std::size_t chart;
  std::vector<double> t;
  std::vector<double> x;
};

// uniform bucket grid over [0,1]^d
class ImageIndex {
 public:
  ImageIndex(std::vector<ImagePoint> pts, std::size_t d, unsigned cells)
      : pts_(std::move(pts)), d_(d), cells_(cells) {
    for (std::size_t i = 0; i < pts_.size(); ++i) buckets_[key(cell_of(pts_[i].x))].push_back(i);
  }

  // per chart, the nearest image point within best + margin; sorted by distance
  std::vector<std::size_t> nearest(std::span<const double> x, double margin, double& best) const {
    std::map<std::size_t, std::pair<double, std::size_t>> per_chart;
    auto c = cell_of(x);
    best = std::numeric_limits<double>::infinity();
    double h = 1.0 / cells_;
    for (unsigned ring = 0; ring <= cells_; ++ring) {
      visit_ring(c, ring, [&](long kk) {
        auto it = buckets_.find(kk);
        if (it == buckets_.end()) return;
        for (auto i : it->second) {
          double dd = dist(x, pts_[i].x);
          best = std::min(best, dd);
          auto [pos, fresh] = per_chart.try_emplace(pts_[i].chart, dd, i);
          if (!fresh && dd < pos->second.first) pos->second = {dd, i};
        }
      });
      // points outside the ring are at least ring * h away
      if (std::isfinite(best) && ring * h > best + margin) break;
    }
    std::vector<std::pair<double, std::size_t>> found;
    for (auto& [chart, e] : per_chart)
      if (e.first <= best + margin) found.push_back(e);
    std::sort(found.begin(), found.end());
    std::vector<std::size_t> out;
    for (auto& f : found) out.push_back(f.second);
    return out;
  }

  const ImagePoint& operator[](std::size_t i) const { return pts_[i]; }
  bool empty() const { return pts_.empty(); }

 private:
  std::vector<long> cell_of(std::span<const double> x) const {
    std::vector<long> c(d_);
    for (std::size_t i = 0; i < d_; ++i)
      c[i] = std::clamp<long>(static_cast<long>(std::floor(x[i] * cells_)), 0, cells_ - 1);
    return c;
  }
  long key(const std::vector<long>& c) const {
    long k = 0;
    for (auto v : c) k = k * (cells_ + 1) + v;
    return k;
  }
  template <class F>
  void visit_ring(const std::vector<long>& c, unsigned ring, F&& f) const {
    long r = ring;
    if (d_ == 1) {
      for (long dx : {-r, r}) {
        long v = c[0] + dx;
        if (v >= 0 && v < static_cast<long>(cells_)) f(key({v}));
        if (r == 0) break;
      }
      return;
    }
    for (long dx = -r; dx <= r; ++dx)
      for (long dy = -r; dy <= r; ++dy) {
        if (std::max(std::labs(dx), std::labs(dy)) != r) continue;
        long a = c[0] + dx, b = c[1] + dy;
        if (a < 0 || b < 0 || a >= static_cast<long>(cells_) || b >= static_cast<long>(cells_))
          continue;
        f(key({a, b}));
      }
  }

  std::vector<ImagePoint> pts_;
  std::size_t d_;
  unsigned cells_;
  std::unordered_map<long, std::vector<std::size_t>> buckets_;
};

std::vector<ImagePoint> image_grid(const Resolution& res, unsigned per_axis) {
  std::vector<std::vector<ImagePoint>> per(res.count());
  parallel_for(res.count(), [&](std::size_t c) {
    const auto& ch = res.charts[c].chart;
    std::size_t l = ch.source_dim;
    std::size_t total = 1;
    for (std::size_t i = 0; i < l; ++i) total *= per_axis + 1;
    for (std::size_t k = 0; k < total; ++k) {
      std::vector<double> t(l);
      std::size_t rest = k;
      for (std::size_t i = 0; i < l; ++i) {
        t[i] = clamp_open(double(rest % (per_axis + 1)) / per_axis);
        rest /= per_axis + 1;
      }
      try {
        auto x = ch(t);
        bool ok = true;
        for (double v : x) ok = ok && std::isfinite(v);
        if (ok) per[c].push_back({c, t, x});
      } catch (const std::exception&) {
      }
    }
  });
  std::vector<ImagePoint> out;
  for (auto& v : per)
    for (auto& p : v) out.push_back(std::move(p));
  return out;
}

// damped Gauss-Newton in the chart domain from t, then a short pattern
// search; stops once the distance is below `enough`
double refine(const TriangularChart& ch, std::vector<double> t, std::span<const double> x,
              double start, double enough) {
  const std::size_t l = t.size(), d = x.size();
  auto value = [&](const std::vector<double>& s) {
    try {
      return dist(x, ch(s));
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  double best = value(t);
  double lambda = 1e-6;
  for (int it = 0; it < 40 && best > enough; ++it) {
    std::vector<Jet<double>> jets;
    try {
      jets = eval_jets(ch.components, t, 1);
    } catch (const std::exception&) {
      break;
    }
    // J is d x l; solve (J^T J + lambda I) dt = J^T (x - phi)
    double a[2][2] = {{0, 0}, {0, 0}}, g[2] = {0, 0};
    for (std::size_t i = 0; i < d; ++i) {
      double res = x[i] - jets[i].value();
      for (std::size_t p = 0; p < l; ++p) {
        std::vector<unsigned> e(l, 0);
        e[p] = 1;
        double jp = jets[i].derivative(e);
        g[p] += jp * res;
        for (std::size_t q = 0; q < l; ++q) {
          std::vector<unsigned> f(l, 0);
          f[q] = 1;
          a[p][q] += jp * jets[i].derivative(f);
        }
      }
    }
    std::vector<double> step(l, 0.0);
    for (std::size_t p = 0; p < l; ++p) a[p][p] += lambda * (1 + a[p][p]);
    if (l == 1) {
      step[0] = g[0] / a[0][0];
    } else {
      double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
      if (det == 0) break;
      step[0] = (g[0] * a[1][1] - g[1] * a[0][1]) / det;
      step[1] = (a[0][0] * g[1] - a[1][0] * g[0]) / det;
    }
    auto s = t;
    for (std::size_t p = 0; p < l; ++p) s[p] = clamp_open(s[p] + step[p]);
    double v = value(s);
    if (v < best) {
      best = v;
      t = s;
      lambda = std::max(lambda / 4, 1e-12);
    } else {
      lambda *= 16;
      if (lambda > 1e8) break;
    }
  }
  double h = start;
  while (h > 1e-10 && best > enough) {
    bool moved = false;
    for (std::size_t i = 0; i < l; ++i)
      for (double sgn : {-1.0, 1.0}) {
        auto s = t;
        s[i] = clamp_open(s[i] + sgn * h);
        double v = value(s);
        if (v < best) {
          best = v;
          t = s;
          moved = true;
        }
      }
    if (!moved) h /= 2;
  }
  return best;
}

std::vector<std::vector<double>> target_samples(const Presentation& target, std::size_t count,
                                                unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> out;
  double lo = target.box_lo().get_d(), hi = target.box_hi().get_d();
  int dim = max_dimension(target);
  if (dim < 0) return out;
  if (dim == static_cast<int>(target.vars)) {
    std::size_t tries = 0;
    while (out.size() < count && tries < 400 * count) {
      ++tries;
      std::vector<double> x(target.vars);
      for (auto& v : x) v = lo + (hi - lo) * u(rng);
      if (target.contains(std::span<const double>(x))) out.push_back(std::move(x));
    }
  }
  // lower-dimensional pieces through their cell charts
  Resolution cells = cells_resolution(target);
  std::size_t extra = 0;
  for (const auto& c : cells.charts)
    if (c.chart.source_dim < target.vars) ++extra;
  if (extra == 0) return out;
  std::size_t each = std::max<std::size_t>(1, (dim == int(target.vars) ? count / 10 : count) / extra);
  for (const auto& c : cells.charts) {
    if (c.chart.source_dim >= target.vars) continue;
    for (std::size_t k = 0; k < each; ++k) {
      std::vector<double> t(c.chart.source_dim);
      for (auto& v : t) v = clamp_open(u(rng));
      try {
        out.push_back(c.chart(t));
      } catch (const std::exception&) {
      }
      if (c.chart.source_dim == 0) break;
    }
  }
  return out;
}

}  // namespace

bool VerificationReport::pass() const {
  return std::all_of(gates.begin(), gates.end(), [](const GateResult& g) { return g.pass; });
}

void VerificationReport::merge(const VerificationReport& other) {
  gates.insert(gates.end(), other.gates.begin(), other.gates.end());
  wall_ms += other.wall_ms;
}

json to_json(const VerificationReport& r) {
  json j;
  j["pass"] = r.pass();
  j["seed"] = r.seed;
  j["wall_ms"] = std::round(r.wall_ms * 1000) / 1000;
  json gates = json::array();
  for (const auto& g : r.gates) {
    json x;
    x["name"] = g.name;
    x["pass"] = g.pass;
    x["measured"] = std::isfinite(g.measured) ? json(g.measured) : json(nullptr);
    x["threshold"] = g.threshold;
    x["details"] = g.details;
    gates.push_back(x);
  }
  j["gates"] = gates;
  return j;
}

VerificationReport check_coverage(const Resolution& res, const Presentation& target,
                                  std::size_t samples, double tol, unsigned long seed) {
  auto t0 = Clock::now();
  if (tol < 0) tol = res.coverage_tol;
  Presentation shrunk = res.shrink_n > 1 ? target.shrunk(res.shrink_n) : target;
  auto pts = target_samples(shrunk, samples, seed);
  GateResult g;
  g.name = "coverage";
  g.threshold = res.density + tol;
  std::size_t d = target.vars;
  std::vector<double> worst(pts.size(), 0.0);
  if (!pts.empty()) {
    ImageIndex index(image_grid(res, 64), d, 64);
    parallel_for(pts.size(), [&](std::size_t i) {
      if (index.empty()) {
        worst[i] = std::numeric_limits<double>::infinity();
        return;
      }
      double best;
      auto near = index.nearest(pts[i], 4.0 / 64, best);
      if (best <= g.threshold) {
        worst[i] = best;
        return;
      }
      for (auto k : near) {
        const auto& ip = index[k];
        if (ip.t.empty()) continue;
        best = std::min(best, refine(res.charts[ip.chart].chart, ip.t, pts[i], 1.0 / 64,
                                     g.threshold));
        if (best <= g.threshold) break;
      }
      worst[i] = best;
    });
  }
  std::size_t failed = 0, arg = 0;
  for (std::size_t i = 0; i < worst.size(); ++i) {
    if (worst[i] > g.threshold) ++failed;
    if (worst[i] > worst[arg]) arg = i;
  }
  g.measured = worst.empty() ? 0.0 : worst[arg];
  g.pass = failed == 0;
  g.details["samples"] = pts.size();
  g.details["failed"] = failed;
  g.details["density"] = res.density;
  g.details["tolerance"] = tol;
  g.details["image_grid"] = 64;
  if (!worst.empty()) g.details["worst_sample"] = pts[arg];
  VerificationReport r;
  r.seed = seed;
  r.gates.push_back(std::move(g));
  r.wall_ms = ms_since(t0);
  return r;
}

VerificationReport check_norms(const Resolution& res, double tol, const NormPolicy& policy) {
  auto t0 = Clock::now();
  struct Out {
    double norm = 0;
    bool converged = true;
    std::string error;
  };
  std::vector<Out> outs(res.count());
  for (std::size_t c = 0; c < res.count(); ++c) {
    const auto& ch = res.charts[c].chart;
    MultiIndex a = alpha_for_dim(res.alpha, ch.source_dim);
    try {
      auto rep = norm_estimate(ch, a, policy);
      outs[c].norm = rep.norm;
      outs[c].converged = rep.converged;
      for (const auto& f : res.functions) {
        Expr comp = expr::compose(f, ch.components);
        auto cr = norm_estimate(std::span<const Expr>(&comp, 1), ch.source_dim, a, policy);
        outs[c].norm = std::max(outs[c].norm, cr.norm);
        outs[c].converged = outs[c].converged && cr.converged;
      }
    } catch (const std::exception& e) {
      outs[c].error = e.what();
      outs[c].norm = std::numeric_limits<double>::infinity();
    }
  }
  GateResult g;
  g.name = "norms";
  g.threshold = 1.0 + tol;
  std::size_t bad = 0, nonconv = 0, worst = 0;
  json errors = json::array();
  for (std::size_t c = 0; c < outs.size(); ++c) {
    if (!outs[c].converged) ++nonconv;
    if (!outs[c].error.empty()) errors.push_back({{"chart", c}, {"error", outs[c].error}});
    if (outs[c].norm > g.threshold || !outs[c].converged) ++bad;
    if (outs[c].norm > outs[worst].norm) worst = c;
  }
  g.measured = outs.empty() ? 0.0 : outs[worst].norm;
  g.pass = bad == 0;
  g.details["charts"] = outs.size();
  g.details["failed"] = bad;
  g.details["not_converged"] = nonconv;
  g.details["worst_chart"] = worst;
  g.details["errors"] = errors;
  VerificationReport r;
  r.gates.push_back(std::move(g));
  r.wall_ms = ms_since(t0);
  return r;
}

namespace {

int sign_at_point(const MultiPoly& p, const AlgebraicNumber& x, const Rational& y) {
  MultiPoly q = p.specialize(1, y);
  if (q.is_zero()) return 0;
  UPoly u = q.depends_on(0) ? UPoly(q.dense_in(0)) : UPoly({q.constant_term()});
  return sign_at(u, x);
}

}  // namespace

VerificationReport check_sign_invariance(const Decomposition& decomp,
                                         const std::vector<MultiPoly>& polys,
                                         std::size_t samples) {
  auto t0 = Clock::now();
  GateResult g;
  g.name = "sign_invariance";
  std::size_t checked = 0, skipped = 0, mismatched = 0;
  json bad = json::array();
  for (const auto& s : decomp.slices) {
    std::vector<int> first;
    bool mixed = false;
    auto record = [&](std::vector<int> signs) {
      ++checked;
      if (first.empty()) first = signs;
      else if (signs != first) mixed = true;
    };
    auto pts = decomp.rational_samples(s.id, samples);
    for (const auto& x : pts) {
      std::vector<int> signs;
      for (const auto& p : polys) signs.push_back(sgn(p.evaluate(std::span<const Rational>(x))));
      record(signs);
    }
    const BaseCell& c = decomp.cells[s.cell];
    if (pts.empty() && decomp.dim == 2 && s.kind == SliceKind::Section && !c.is_point()) {
      // irrational section values over rational base samples
      for (const auto& y : c.samples(samples)) {
        const auto& br = decomp.branches[s.cell][s.lower - 1];
        AlgebraicNumber x = br.value_at(y);
        std::vector<int> signs;
        for (const auto& p : polys) signs.push_back(sign_at_point(p, x, y));
        record(signs);
      }
    }
    if (first.empty()) {
      ++skipped;
      continue;
    }
    if (mixed || (polys.size() == decomp.inputs.size() && polys == decomp.inputs && first != s.signs)) {
      ++mismatched;
      bad.push_back(s.id);
    }
  }
  g.measured = static_cast<double>(mismatched);
  g.threshold = 0;
  g.pass = mismatched == 0;
  g.details["slices"] = decomp.slices.size();
  g.details["samples_checked"] = checked;
  g.details["slices_without_exact_samples"] = skipped;
  g.details["mismatched_slices"] = bad;
  VerificationReport r;
  r.gates.push_back(std::move(g));
  r.wall_ms = ms_since(t0);
  return r;
}

VerificationReport check_estimate_eq1(const Expr& g, unsigned r, double tol, unsigned grid) {
  auto t0 = Clock::now();
  GateResult gate;
  gate.name = "piece_estimate";
  gate.threshold = 2.0 + tol;
  double worst = 0;
  for (unsigned k = 1; k <= grid; ++k) {
    double x = clamp_open(double(k) / grid);
    std::vector<double> pt{x};
    auto j = eval_jets(std::span<const Expr>(&g, 1), pt, r);
    worst = std::max(worst, x * std::fabs(j[0].derivative({r})));
  }
  gate.measured = worst;
  gate.pass = worst <= gate.threshold;
  gate.details["order"] = r;
  gate.details["grid"] = grid;
  VerificationReport rep;
  rep.gates.push_back(std::move(gate));
  rep.wall_ms = ms_since(t0);
  return rep;
}

VerificationReport check_estimate_eq1(const MonotonePiece& piece, double tol, unsigned grid) {
  return check_estimate_eq1(piece.oriented(), piece.r, tol, grid);
}

VerificationReport check_sector_estimate(const Expr& f, const Expr& zeta, unsigned s, double tol,
                                      unsigned grid) {
  auto t0 = Clock::now();
  GateResult gate;
  gate.name = "sector_estimate";
  gate.threshold = 2.0 + tol;
  double worst = 0;
  for (unsigned j = 1; j < grid; ++j) {
    double y = double(j) / grid;
    std::vector<double> yp{y};
    double z = eval(zeta, yp);
    for (unsigned i = 1; i <= grid; ++i) {
      double x = clamp_open(z + (1.0 - z) * double(i) / grid);
      std::vector<double> pt{x, y};
      auto jet = eval_jets(std::span<const Expr>(&f, 1), pt, s + 1);
      worst = std::max(worst, std::fabs(x - z) * std::fabs(jet[0].derivative({s + 1, 0})));
    }
  }
  gate.measured = worst;
  gate.pass = worst <= gate.threshold;
  gate.details["order"] = s;
  gate.details["grid"] = grid;
  VerificationReport rep;
  rep.gates.push_back(std::move(gate));
  rep.wall_ms = ms_since(t0);
  return rep;
}

MultiPoly squash_unit(const MultiPoly& p) {
  Rational b(0);
  for (const auto& [e, c] : p.terms()) b += abs_value(c);
  Rational s = 1 / (2 * (1 + b));
  return p * s + MultiPoly::constant(p.nvars(), Rational(1, 2));
}

namespace {

// exponent vectors of total degree <= deg in d variables
std::vector<Exponents> monomials(std::size_t d, unsigned deg) {
  std::vector<Exponents> out;
  if (d == 1) {
    for (unsigned k = 0; k <= deg; ++k) out.push_back({k});
    return out;
  }
  for (unsigned a = 0; a <= deg; ++a)
    for (unsigned b = 0; a + b <= deg; ++b) out.push_back({a, b});
  return out;
}

MultiPoly draw(const std::vector<double>& unit, const std::vector<Exponents>& mons, double mag) {
  MultiPoly p(mons.front().size());
  Rational m(mag);
  for (std::size_t i = 0; i < mons.size(); ++i) {
    Rational c = ratio(static_cast<long>(std::lround(unit[i] * (1 << 20))), 1L << 20);
    p.add_term(mons[i], c * m);
  }
  return p;
}

std::string fmt(double v, const char* f) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

ExperimentResult degree_robustness_experiment(const ExperimentConfig& cfg,
                                              const EngineConfig& engine) {
  if (cfg.buckets.empty()) throw std::invalid_argument("experiment needs at least one bucket");
  if (cfg.degree < 1) throw std::invalid_argument("experiment degree must be at least 1");
  if (cfg.order < 1) throw std::invalid_argument("experiment order must be at least 1");
  if (cfg.dim < 1 || cfg.dim > 2) throw std::invalid_argument("experiment dimension must be 1 or 2");
  if (cfg.runs < 1) throw std::invalid_argument("experiment needs at least one run");
  auto t0 = Clock::now();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto mons = monomials(cfg.dim, cfg.degree);
  auto unit_draw = [&] {
    std::vector<double> v(mons.size());
    // the top-degree part is kept away from zero so the degree is exact
    while (true) {
      for (auto& x : v) x = u(rng);
      bool top = false;
      for (std::size_t i = 0; i < mons.size(); ++i) {
        unsigned w = 0;
        for (auto e : mons[i]) w += e;
        if (w == cfg.degree && std::fabs(v[i]) > 1e-3) top = true;
      }
      if (top) return v;
    }
  };

  ExperimentResult out;
  std::vector<std::vector<double>> paired;
  if (cfg.paired)
    for (unsigned run = 0; run < cfg.runs; ++run) paired.push_back(unit_draw());
  for (double mag : cfg.buckets) {
    for (unsigned run = 0; run < cfg.runs; ++run) {
      auto unit = cfg.paired ? paired[run] : unit_draw();
      MultiPoly p = squash_unit(draw(unit, mons, mag));
      ExperimentRow row{cfg.seed, cfg.degree, cfg.order, mag, run, 0, 0, 0.0, ""};
      auto t1 = Clock::now();
      try {
        Resolution res;
        EngineConfig ec = engine;
        ec.record_norms = false;
        if (cfg.dim == 1) {
          res = resolve_interval_cr(expr::poly(p), 0, 1, cfg.order, ec);
        } else {
          Presentation target;
          target.vars = 2;
          target.disjuncts = {
              {{p - MultiPoly::constant(2, Rational(1, 2)), Relation::Less}}};
          res = epsilon_resolution(target, MultiIndex{0, cfg.order}, 10, {}, ec);
        }
        row.N = res.count();
        row.max_chart_degree = res.max_degree();
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      row.wall_ms = ms_since(t1);
      out.rows.push_back(std::move(row));
    }
  }

  std::map<double, std::size_t> max_n;
  std::size_t failures = 0;
  for (const auto& r : out.rows) {
    max_n[r.bucket] = std::max(max_n[r.bucket], r.N);
    if (!r.error.empty()) ++failures;
  }
  GateResult g;
  g.name = "max_N_constant_across_buckets";
  std::size_t lo = std::numeric_limits<std::size_t>::max(), hi = 0;
  json per = json::object();
  for (auto [b, n] : max_n) {
    lo = std::min(lo, n);
    hi = std::max(hi, n);
    per[fmt(b, "%g")] = n;
  }
  g.measured = double(hi - lo);
  g.threshold = 0;
  g.pass = hi == lo;
  g.details["max_N_per_bucket"] = per;
  g.details["degree"] = cfg.degree;
  g.details["order"] = cfg.order;
  g.details["runs"] = cfg.runs;
  g.details["paired"] = cfg.paired;
  g.details["dim"] = cfg.dim;
  out.report.gates.push_back(std::move(g));
  GateResult f;
  f.name = "engine_failures";
  f.measured = double(failures);
  f.threshold = 0;
  f.pass = failures == 0;
  out.report.gates.push_back(std::move(f));
  out.report.seed = cfg.seed;
  out.report.wall_ms = ms_since(t0);
  return out;
}

std::string experiment_csv(const std::vector<ExperimentRow>& rows) {
  std::string s = "seed,degree,order,bucket,run,N,max_chart_degree,wall_ms\n";
  for (const auto& r : rows) {
    s += std::to_string(r.seed) + "," + std::to_string(r.degree) + "," + std::to_string(r.order) +
         "," + fmt(r.bucket, "%g") + "," + std::to_string(r.run) + "," + std::to_string(r.N) + "," +
         std::to_string(r.max_chart_degree) + "," + fmt(r.wall_ms, "%.3f") + "\n";
  }
  return s;
}

VerificationReport verify_resolution(const Resolution& res, const Presentation& target,
                                     std::size_t samples, unsigned long seed) {
  VerificationReport r = check_coverage(res, target, samples, -1.0, seed);
  r.merge(check_norms(res));
  return r;
}

}  // namespace gromov
