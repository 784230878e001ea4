#include "gromov/poly_parser.hpp"
#include "gromov/semialg.hpp"

namespace gromov {

json to_json(const AlgebraicNumber& a) {
  if (a.is_rational()) return {{"value", to_string(a.rational_value())}};
  return {{"poly", a.poly().to_multi(1, 0).to_string()},
          {"lo", to_string(a.lo())},
          {"hi", to_string(a.hi())},
          {"approx", a.to_double()}};
}

AlgebraicNumber algebraic_from_json(const json& j) {
  if (j.contains("value")) return AlgebraicNumber(parse_rational(j["value"].get<std::string>()));
  UPoly p = UPoly::from_multi(parse_poly(j["poly"].get<std::string>(), 1));
  return AlgebraicNumber(p, {parse_rational(j["lo"].get<std::string>()),
                             parse_rational(j["hi"].get<std::string>())});
}

json to_json(const BaseCell& c) {
  json j = {{"kind", c.is_point() ? "point" : "open"}};
  if (c.is_point()) {
    j["at"] = to_json(c.point());
  } else {
    j["lo"] = to_json(c.lo);
    j["hi"] = to_json(c.hi);
  }
  return j;
}

json to_json(const Decomposition& d) {
  auto strings = [](const std::vector<MultiPoly>& ps) {
    json a = json::array();
    for (const auto& p : ps) a.push_back(p.to_string());
    return a;
  };
  json cells = json::array();
  for (std::size_t c = 0; c < d.cells.size(); ++c) {
    json cj = to_json(d.cells[c]);
    json br = json::array();
    if (d.dim == 2) {
      for (const auto& b : d.branches[c])
        br.push_back({{"fiber", b.fiber.to_string()},
                      {"root_index", b.root_index},
                      {"basis_index", b.basis_index}});
    }
    cj["branches"] = br;
    cells.push_back(cj);
  }
  json slices = json::array();
  for (const auto& s : d.slices) {
    slices.push_back({{"kind", s.kind == SliceKind::Sector ? "sector" : "section"},
                      {"cell", s.cell},
                      {"lower", s.lower},
                      {"upper", s.upper},
                      {"dimension", s.dimension},
                      {"signs", s.signs}});
  }
  return {{"dim", d.dim},
          {"box", {{"lo", to_string(d.box_lo)}, {"hi", to_string(d.box_hi)}}},
          {"inputs", strings(d.inputs)},
          {"basis", strings(d.basis)},
          {"projection", strings(d.projection)},
          {"max_input_degree", d.max_input_degree},
          {"max_projection_degree", d.max_projection_degree},
          {"cells", cells},
          {"slices", slices}};
}

}  // namespace gromov
