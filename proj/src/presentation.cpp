#include <algorithm>

#include "gromov/poly_parser.hpp"
#include "gromov/semialg.hpp"

namespace gromov {

std::string relation_symbol(Relation r) {
  switch (r) {
    case Relation::Greater:
      return ">";
    case Relation::Less:
      return "<";
    case Relation::Equal:
      return "=";
  }
  return "?";
}

Relation parse_relation(const std::string& s) {
  if (s == ">") return Relation::Greater;
  if (s == "<") return Relation::Less;
  if (s == "=" || s == "==") return Relation::Equal;
  throw PresentationError("unknown relation '" + s + "'");
}

bool SignCondition::holds(int sign) const {
  switch (rel) {
    case Relation::Greater:
      return sign > 0;
    case Relation::Less:
      return sign < 0;
    case Relation::Equal:
      return sign == 0;
  }
  return false;
}

Rational Presentation::box_lo() const { return box_n <= 1 ? Rational(0) : Rational(1, box_n); }
Rational Presentation::box_hi() const { return 1 - box_lo(); }

std::vector<MultiPoly> Presentation::polynomials() const {
  std::vector<MultiPoly> out;
  for (const auto& conj : disjuncts)
    for (const auto& c : conj)
      if (std::find(out.begin(), out.end(), c.poly) == out.end()) out.push_back(c.poly);
  return out;
}

bool Presentation::satisfied_by(std::span<const int> signs) const {
  auto polys = polynomials();
  for (const auto& conj : disjuncts) {
    bool ok = true;
    for (const auto& c : conj) {
      auto idx = static_cast<std::size_t>(std::find(polys.begin(), polys.end(), c.poly) -
                                          polys.begin());
      if (!c.holds(signs[idx])) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

bool Presentation::contains(std::span<const Rational> x) const {
  if (x.size() != vars) throw PresentationError("point dimension mismatch");
  Rational lo = box_lo(), hi = box_hi();
  for (const auto& v : x)
    if (!(v > lo && v < hi)) return false;
  for (const auto& conj : disjuncts) {
    bool ok = true;
    for (const auto& c : conj) {
      if (!c.holds(sgn(c.poly.evaluate(x)))) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

bool Presentation::contains(std::span<const double> x) const {
  if (x.size() != vars) throw PresentationError("point dimension mismatch");
  double lo = box_lo().get_d(), hi = box_hi().get_d();
  for (double v : x)
    if (!(v > lo && v < hi)) return false;
  for (const auto& conj : disjuncts) {
    bool ok = true;
    for (const auto& c : conj) {
      double v = c.poly.evaluate(x);
      int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
      if (!c.holds(s)) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

Presentation Presentation::shrunk(unsigned n) const {
  Presentation p = *this;
  p.box_n = n;
  return p;
}

std::size_t presentation_degree(const Presentation& pres) {
  std::size_t total = 0;
  for (const auto& conj : pres.disjuncts)
    for (const auto& c : conj) total += c.poly.total_degree();
  return total;
}

json to_json(const Presentation& pres) {
  json u = json::array();
  for (const auto& conj : pres.disjuncts) {
    json c = json::array();
    for (const auto& sc : conj)
      c.push_back({{"poly", sc.poly.to_string()}, {"rel", relation_symbol(sc.rel)}});
    u.push_back(c);
  }
  return {{"vars", pres.vars}, {"box", {{"n", pres.box_n}}}, {"union", u}};
}

Presentation presentation_from_json(const json& j) {
  Presentation p;
  try {
    if (!j.is_object()) throw PresentationError("presentation must be a JSON object");
    if (!j.contains("vars") || !j["vars"].is_number_unsigned())
      throw PresentationError("\"vars\" must be a positive integer");
    p.vars = j["vars"].get<std::size_t>();
    if (p.vars < 1 || p.vars > 2) throw PresentationError("only 1 or 2 variables are supported");
    if (j.contains("box")) {
      const auto& b = j["box"];
      if (!b.is_object() || !b.contains("n") || !b["n"].is_number_unsigned())
        throw PresentationError("\"box\" must look like {\"n\": 1}");
      p.box_n = b["n"].get<unsigned>();
      if (p.box_n < 1) throw PresentationError("box n must be >= 1");
    }
    if (!j.contains("union") || !j["union"].is_array())
      throw PresentationError("\"union\" must be a list of lists of conditions");
    for (const auto& conj : j["union"]) {
      if (!conj.is_array()) throw PresentationError("each union member must be a list");
      std::vector<SignCondition> cs;
      for (const auto& c : conj) {
        if (!c.is_object() || !c.contains("poly") || !c.contains("rel") ||
            !c["poly"].is_string() || !c["rel"].is_string())
          throw PresentationError("condition must be {\"poly\": ..., \"rel\": ...}");
        SignCondition sc;
        sc.poly = parse_poly(c["poly"].get<std::string>(), p.vars);
        if (sc.poly.is_zero()) throw PresentationError("zero polynomial in a sign condition");
        sc.rel = parse_relation(c["rel"].get<std::string>());
        cs.push_back(std::move(sc));
      }
      p.disjuncts.push_back(std::move(cs));
    }
  } catch (const PolyError& e) {
    throw PresentationError(e.what());
  } catch (const json::exception& e) {
    throw PresentationError(e.what());
  }
  return p;
}

}  // namespace gromov
