#include <cmath>
#include <limits>
#include <unordered_map>

#include "gromov/charts.hpp"
#include "gromov/poly_parser.hpp"
#include "gromov/semialg.hpp"

namespace gromov {

namespace {

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
double num_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

json rationals(const std::vector<Rational>& v) {
  json a = json::array();
  for (const auto& q : v) a.push_back(to_string(q));
  return a;
}

std::vector<Rational> rationals_from(const json& j) {
  std::vector<Rational> v;
  for (const auto& x : j) v.push_back(parse_rational(x.get<std::string>()));
  return v;
}

class NodeWriter {
 public:
  std::size_t id(const Expr& e) {
    auto it = ids_.find(e.get());
    if (it != ids_.end()) return it->second;
    json n;
    n["kind"] = node_kind_name(e->kind);
    switch (e->kind) {
      case NodeKind::Var: n["index"] = e->index; break;
      case NodeKind::Const: n["value"] = to_json(e->constant); break;
      case NodeKind::Affine:
        n["offset"] = to_string(e->offset);
        n["coefs"] = rationals(e->coefs);
        break;
      case NodeKind::Poly:
        n["nvars"] = e->poly.nvars();
        n["poly"] = e->poly.to_string();
        break;
      case NodeKind::Square:
      case NodeKind::Blend: n["args"] = list(e->args); break;
      case NodeKind::Branch:
        if (e->fiber) {
          n["fiber"] = id(e->fiber);
        } else {
          n["nvars"] = e->poly.nvars();
          n["poly"] = e->poly.to_string();
        }
        n["window"] = rationals({e->window_lo, e->window_hi});
        n["root_index"] = e->root_index;
        n["args"] = list(e->args);
        break;
      case NodeKind::Compose:
        n["outer"] = id(e->outer);
        n["args"] = list(e->args);
        break;
    }
    std::size_t k = nodes_.size();
    nodes_.push_back(std::move(n));
    ids_.emplace(e.get(), k);
    return k;
  }
  json list(const std::vector<Expr>& es) {
    json a = json::array();
    for (const auto& e : es) a.push_back(id(e));
    return a;
  }
  json nodes() const { return nodes_; }

 private:
  std::unordered_map<const ChartNode*, std::size_t> ids_;
  json nodes_ = json::array();
};

Expr ref(const std::vector<Expr>& built, const json& j) {
  auto k = j.get<std::size_t>();
  if (k >= built.size()) throw ChartError("node reference points forward");
  return built[k];
}

std::vector<Expr> refs(const std::vector<Expr>& built, const json& j) {
  std::vector<Expr> v;
  for (const auto& x : j) v.push_back(ref(built, x));
  return v;
}

json chart_record_json(const ChartRecord& c, NodeWriter& w) {
  json j;
  j["source_dim"] = c.chart.source_dim;
  j["target_dim"] = c.chart.target_dim;
  j["components"] = w.list(c.chart.components);
  j["provenance"] = c.provenance;
  j["degree"] = c.degree;
  j["extends_continuously"] = c.extends_continuously;
  j["norm"] = c.norm ? to_json(*c.norm) : json(nullptr);
  json comp = json::array();
  for (const auto& r : c.composite_norms) comp.push_back(to_json(r));
  j["composite_norms"] = comp;
  return j;
}

}  // namespace

json to_json(const MultiIndex& m) { return m.e; }

MultiIndex multi_index_from_json(const json& j) {
  return MultiIndex(j.get<std::vector<unsigned>>());
}

json to_json(const NormReport& r) {
  json j;
  j["alpha"] = to_json(r.alpha);
  json betas = json::array();
  for (const auto& b : r.betas) betas.push_back(to_json(b));
  j["betas"] = betas;
  json sup = json::array();
  for (double s : r.sup) sup.push_back(num(s));
  j["sup"] = sup;
  j["norm"] = num(r.norm);
  j["derivative_norm"] = num(r.derivative_norm);
  json hist = json::array();
  for (const auto& [m, v] : r.history) hist.push_back(json::array({m, num(v)}));
  j["history"] = hist;
  j["grid"] = r.grid;
  j["converged"] = r.converged;
  j["tolerance"] = r.tolerance;
  return j;
}

NormReport norm_report_from_json(const json& j) {
  NormReport r;
  r.alpha = multi_index_from_json(j.at("alpha"));
  for (const auto& b : j.at("betas")) r.betas.push_back(multi_index_from_json(b));
  for (const auto& s : j.at("sup")) r.sup.push_back(num_from(s));
  if (r.sup.size() != r.betas.size()) throw ChartError("norm report: sup and betas differ in length");
  r.norm = num_from(j.at("norm"));
  r.derivative_norm = num_from(j.at("derivative_norm"));
  for (const auto& h : j.at("history")) r.history.push_back({h.at(0).get<unsigned>(), num_from(h.at(1))});
  r.grid = j.at("grid").get<unsigned>();
  r.converged = j.at("converged").get<bool>();
  r.tolerance = j.at("tolerance").get<double>();
  return r;
}

json exprs_to_json(std::span<const Expr> roots, std::vector<std::size_t>& root_ids) {
  NodeWriter w;
  root_ids.clear();
  for (const auto& e : roots) root_ids.push_back(w.id(e));
  return w.nodes();
}

std::vector<Expr> exprs_from_json(const json& nodes) {
  std::vector<Expr> built;
  for (const auto& n : nodes) {
    std::string kind = n.at("kind").get<std::string>();
    Expr e;
    if (kind == "var") {
      e = expr::var(n.at("index").get<std::size_t>());
    } else if (kind == "const") {
      e = expr::constant(algebraic_from_json(n.at("value")));
    } else if (kind == "affine") {
      e = expr::affine(parse_rational(n.at("offset").get<std::string>()), rationals_from(n.at("coefs")));
    } else if (kind == "poly") {
      e = expr::poly(parse_poly(n.at("poly").get<std::string>(), n.at("nvars").get<std::size_t>()));
    } else if (kind == "square") {
      auto a = refs(built, n.at("args"));
      if (a.size() != 1) throw ChartError("square takes one argument");
      e = expr::square(a[0]);
    } else if (kind == "blend") {
      auto a = refs(built, n.at("args"));
      if (a.size() != 3) throw ChartError("blend takes three arguments");
      e = expr::blend(a[0], a[1], a[2]);
    } else if (kind == "branch") {
      auto w = rationals_from(n.at("window"));
      if (w.size() != 2) throw ChartError("branch window needs two endpoints");
      auto a = refs(built, n.at("args"));
      if (n.contains("fiber")) {
        e = expr::branch(ref(built, n.at("fiber")), a, w[0], w[1]);
      } else {
        e = expr::branch(parse_poly(n.at("poly").get<std::string>(), n.at("nvars").get<std::size_t>()),
                         a, w[0], w[1], n.at("root_index").get<unsigned>());
      }
    } else if (kind == "compose") {
      // rebuild the node as stored; no folding on load
      e = expr::compose_node(ref(built, n.at("outer")), refs(built, n.at("args")));
    } else {
      throw ChartError("unknown node kind '" + kind + "'");
    }
    built.push_back(e);
  }
  return built;
}

json to_json(const Resolution& r) {
  NodeWriter w;
  json j;
  j["dim"] = r.dim;
  j["alpha"] = to_json(r.alpha);
  j["domain"] = {{"lo", rationals(r.domain_lo)}, {"hi", rationals(r.domain_hi)}};
  j["functions"] = w.list(r.functions);
  json charts = json::array();
  for (const auto& c : r.charts) charts.push_back(chart_record_json(c, w));
  j["charts"] = charts;
  j["nodes"] = w.nodes();
  j["count"] = r.count();
  j["max_degree"] = r.max_degree();
  j["coverage_tol"] = r.coverage_tol;
  j["shrink_n"] = r.shrink_n;
  j["density"] = r.density;
  return j;
}

Resolution resolution_from_json(const json& j) {
  Resolution r;
  auto nodes = exprs_from_json(j.at("nodes"));
  r.dim = j.at("dim").get<std::size_t>();
  r.alpha = multi_index_from_json(j.at("alpha"));
  r.domain_lo = rationals_from(j.at("domain").at("lo"));
  r.domain_hi = rationals_from(j.at("domain").at("hi"));
  r.functions = refs(nodes, j.at("functions"));
  for (const auto& c : j.at("charts")) {
    ChartRecord rec;
    rec.chart = TriangularChart(c.at("source_dim").get<std::size_t>(), refs(nodes, c.at("components")));
    if (rec.chart.target_dim != c.at("target_dim").get<std::size_t>())
      throw ChartError("chart target dimension does not match its components");
    rec.provenance = c.at("provenance").get<std::string>();
    rec.degree = c.at("degree").get<unsigned>();
    rec.extends_continuously = c.at("extends_continuously").get<bool>();
    if (!c.at("norm").is_null()) rec.norm = norm_report_from_json(c.at("norm"));
    for (const auto& n : c.at("composite_norms")) rec.composite_norms.push_back(norm_report_from_json(n));
    r.charts.push_back(std::move(rec));
  }
  if (j.contains("count") && j.at("count").get<std::size_t>() != r.charts.size())
    throw ChartError("resolution count does not match its charts");
  r.coverage_tol = j.at("coverage_tol").get<double>();
  r.shrink_n = j.at("shrink_n").get<unsigned>();
  r.density = j.at("density").get<double>();
  return r;
}

}  // namespace gromov
