#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "gromov/engine.hpp"
#include "gromov/poly_parser.hpp"
#include "gromov/verifier.hpp"

using namespace gromov;

namespace {

// bad flags or inputs; exit 1
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + path);
    out << text;
    out.flush();
    if (!out) throw ValidationError("write failed for " + path);
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw ValidationError("cannot move output into place at " + path + ": " + ec.message());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

Presentation read_presentation(const std::string& path) {
  try {
    return presentation_from_json(read_json(path));
  } catch (const PresentationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

Resolution read_resolution(const std::string& path) {
  try {
    return resolution_from_json(read_json(path));
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

MultiPoly read_poly(const std::string& text, std::size_t nvars) {
  try {
    return parse_poly(text, nvars);
  } catch (const std::exception& e) {
    throw ValidationError("polynomial \"" + text + "\": " + e.what());
  }
}

Rational read_rational(const std::string& text) {
  try {
    return parse_rational(text);
  } catch (const std::exception& e) {
    throw ValidationError("number \"" + text + "\": " + e.what());
  }
}

void check_threads_env() {
  const char* s = std::getenv("GROMOV_PARAM_THREADS");
  if (!s) return;
  std::string v(s);
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos || std::stol(v) < 1)
    throw ValidationError("GROMOV_PARAM_THREADS must be a positive integer");
}

// the set a resolution claims to cover when no target is given
Presentation domain_presentation(const Resolution& res) {
  Presentation p;
  p.vars = res.dim;
  p.box_n = 1;
  std::vector<SignCondition> conj;
  for (std::size_t i = 0; i < res.dim; ++i) {
    MultiPoly x = MultiPoly::variable(res.dim, i);
    if (i < res.domain_lo.size() && res.domain_lo[i] > 0)
      conj.push_back({x - MultiPoly::constant(res.dim, res.domain_lo[i]), Relation::Greater});
    if (i < res.domain_hi.size() && res.domain_hi[i] < 1)
      conj.push_back({MultiPoly::constant(res.dim, res.domain_hi[i]) - x, Relation::Greater});
  }
  if (conj.empty()) conj.push_back({MultiPoly::constant(res.dim, 1), Relation::Greater});
  p.disjuncts.push_back(conj);
  return p;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string samples_csv(const Resolution& res, unsigned grid) {
  std::size_t lmax = 0;
  for (const auto& c : res.charts) lmax = std::max(lmax, c.chart.source_dim);
  std::string s = "chart_id";
  for (std::size_t i = 1; i <= lmax; ++i) s += ",t" + std::to_string(i);
  for (std::size_t i = 1; i <= res.dim; ++i) s += ",x" + std::to_string(i);
  s += "\n";
  for (std::size_t id = 0; id < res.count(); ++id) {
    const auto& ch = res.charts[id].chart;
    std::size_t l = ch.source_dim, total = 1;
    for (std::size_t i = 0; i < l; ++i) total *= grid + 1;
    for (std::size_t k = 0; k < total; ++k) {
      std::vector<double> t(l);
      std::size_t rest = k;
      for (std::size_t i = 0; i < l; ++i) {
        t[i] = std::clamp(double(rest % (grid + 1)) / grid, 1e-9, 1 - 1e-9);
        rest /= grid + 1;
      }
      std::vector<double> x;
      try {
        x = ch(t);
      } catch (const std::exception&) {
        continue;
      }
      s += std::to_string(id);
      for (std::size_t i = 0; i < lmax; ++i) s += "," + (i < l ? num(t[i]) : std::string());
      for (double v : x) s += "," + num(v);
      s += "\n";
    }
  }
  return s;
}

std::vector<double> parse_buckets(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size() || !(v > 0) || !std::isfinite(v)) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ValidationError("bucket \"" + tok + "\" is not a positive number");
    }
  }
  if (out.empty()) throw ValidationError("--buckets needs at least one value");
  return out;
}

// engine failure: write what is known next to the requested output
int engine_failure(const std::string& out, const std::string& what, const json& diag) {
  json j;
  j["error"] = what;
  j["diagnostics"] = diag;
  std::string path = out + ".diagnostics.json";
  try {
    write_atomic(path, dump(j));
    std::cerr << "engine failure: " << what << " (diagnostics in " << path << ")\n";
  } catch (const std::exception&) {
    std::cerr << "engine failure: " << what << "\n";
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Triangular chart resolutions of semi-algebraic sets and maps"};
  app.require_subcommand(1);

  std::string in, out, poly_text, alpha_text, res_path, target_path, report_path, csv_path,
      samples_path, buckets_text = "1e0,1e3,1e6", a_text = "0", b_text = "1";
  unsigned r = 1, n = 20, degree = 2, runs = 30, dim = 1, grid = 8;
  unsigned long seed = 7;
  std::size_t samples = 10000;
  std::vector<std::string> function_texts;
  bool unpaired = false;
  std::size_t max_charts = 20000;

  auto* dec = app.add_subcommand("decompose", "cylindrical decomposition of a presentation");
  dec->add_option("--in", in, "presentation JSON")->required();
  dec->add_option("--out", out, "decomposition JSON")->required();

  auto* r1 = app.add_subcommand("resolve1d", "resolution of a map (0,1) -> (0,1) in x1");
  r1->add_option("--poly", poly_text, "polynomial in x1")->required();
  r1->add_option("--r", r, "order")->required()->check(CLI::Range(1U, 16U));
  r1->add_option("--a", a_text, "left end of the interval");
  r1->add_option("--b", b_text, "right end of the interval");
  r1->add_option("--max-charts", max_charts, "engine chart limit")->check(CLI::PositiveNumber);
  r1->add_option("--out", out, "resolution JSON")->required();

  auto* r2 = app.add_subcommand("resolve2d", "epsilon-resolution of a planar set");
  r2->add_option("--in", in, "presentation JSON")->required();
  r2->add_option("--alpha", alpha_text, "multi-index such as 0,2")->required();
  r2->add_option("--n", n, "shrink index")->required()->check(CLI::Range(1U, 100000U));
  r2->add_option("--function", function_texts, "polynomial map to resolve as well (repeatable)");
  r2->add_option("--max-charts", max_charts, "engine chart limit")->check(CLI::PositiveNumber);
  r2->add_option("--out", out, "resolution JSON")->required();

  auto* ver = app.add_subcommand("verify", "coverage and norm gates");
  ver->add_option("--res", res_path, "resolution JSON")->required();
  ver->add_option("--target", target_path, "presentation JSON (defaults to the resolution domain)");
  ver->add_option("--report", report_path, "report JSON")->required();
  ver->add_option("--samples", samples, "coverage samples")->check(CLI::Range(1UL, 10000000UL));
  ver->add_option("--seed", seed, "sampling seed");

  auto* exp = app.add_subcommand("experiment", "chart counts across coefficient magnitudes");
  exp->add_option("--degree", degree, "polynomial degree")->required()->check(CLI::Range(1U, 12U));
  exp->add_option("--r", r, "order")->required()->check(CLI::Range(1U, 8U));
  exp->add_option("--buckets", buckets_text, "comma-separated magnitudes");
  exp->add_option("--runs", runs, "draws per bucket")->check(CLI::Range(1U, 100000U));
  exp->add_option("--seed", seed, "random seed");
  exp->add_option("--dim", dim, "1: maps on (0,1); 2: planar sublevel sets")->check(CLI::Range(1U, 2U));
  exp->add_flag("--unpaired", unpaired, "fresh draws per bucket instead of one scaled draw");
  exp->add_option("--csv", csv_path, "per-run CSV")->required();
  exp->add_option("--report", report_path, "summary JSON");

  auto* rep = app.add_subcommand("report", "chart-image sample points for plotting");
  rep->add_option("--res", res_path, "resolution JSON")->required();
  rep->add_option("--samples", samples_path, "CSV output")->required();
  rep->add_option("--grid", grid, "intervals per chart axis")->check(CLI::Range(1U, 1000U));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  std::string failure_out = out.empty() ? (report_path.empty() ? csv_path : report_path) : out;
  try {
    check_threads_env();
    if (dec->parsed()) {
      Presentation p = read_presentation(in);
      Decomposition d = decompose(p);
      json j = to_json(d);
      j["presentation"] = to_json(p);
      write_atomic(out, dump(j));
    } else if (r1->parsed()) {
      MultiPoly f = read_poly(poly_text, 1);
      Rational a = read_rational(a_text), b = read_rational(b_text);
      if (!(a >= 0 && a < b && b <= 1)) throw ValidationError("need 0 <= a < b <= 1");
      EngineConfig cfg;
      cfg.max_charts = max_charts;
      Resolution res = resolve_interval_cr(expr::poly(f), a, b, r, cfg);
      write_atomic(out, dump(to_json(res)));
    } else if (r2->parsed()) {
      Presentation p = read_presentation(in);
      if (p.vars != 2) throw ValidationError("resolve2d needs a presentation in two variables");
      MultiIndex alpha;
      try {
        alpha = parse_multi_index(alpha_text);
      } catch (const std::exception& e) {
        throw ValidationError("--alpha: " + std::string(e.what()));
      }
      if (alpha.size() != 2) throw ValidationError("--alpha needs two entries");
      std::vector<Expr> fns;
      for (const auto& t : function_texts) fns.push_back(expr::poly(read_poly(t, 2)));
      EngineConfig cfg;
      cfg.max_charts = max_charts;
      Resolution res = epsilon_resolution(p, alpha, n, fns, cfg);
      write_atomic(out, dump(to_json(res)));
    } else if (ver->parsed()) {
      Resolution res = read_resolution(res_path);
      Presentation target = target_path.empty() ? domain_presentation(res) : read_presentation(target_path);
      if (target.vars != res.dim) throw ValidationError("target and resolution dimensions differ");
      VerificationReport report = verify_resolution(res, target, samples, seed);
      write_atomic(report_path, dump(to_json(report)));
      std::cout << (report.pass() ? "pass" : "fail") << "\n";
    } else if (exp->parsed()) {
      ExperimentConfig cfg;
      cfg.degree = degree;
      cfg.order = r;
      cfg.buckets = parse_buckets(buckets_text);
      cfg.runs = runs;
      cfg.seed = seed;
      cfg.dim = dim;
      cfg.paired = !unpaired;
      auto result = degree_robustness_experiment(cfg);
      write_atomic(csv_path, experiment_csv(result.rows));
      if (!report_path.empty()) write_atomic(report_path, dump(to_json(result.report)));
      std::cout << (result.report.pass() ? "pass" : "fail") << "\n";
    } else if (rep->parsed()) {
      Resolution res = read_resolution(res_path);
      write_atomic(samples_path, samples_csv(res, grid));
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const PresentationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const EngineError& e) {
    return engine_failure(failure_out, e.what(), e.diagnostics());
  } catch (const std::exception& e) {
    return engine_failure(failure_out, e.what(), json::object());
  }
  return 0;
}
