// JSON shapes for cells, decompositions, normal forms and extension groups.
// Rationals are {num, den}; model elements are their literal `q1,...,qs;m`.
// Keys are emitted in a fixed order.
#pragma once

#include "presburger/cells.hpp"
#include "presburger/syntax.hpp"
#include "presburger/ubd.hpp"
#include "presburger/zgroup.hpp"

#include <json.hpp>

#include <string>

namespace presburger {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json int_json(const Int& n) {
  if (fits_int64(n)) return Json(n.get_si());
  return Json(n.get_str());
}

inline Int int_from_json(const Json& j) {
  if (j.is_number_integer()) return Int(j.get<long>());
  if (j.is_string()) return parse_int(j.get<std::string>());
  throw std::invalid_argument("expected an integer, got " + j.dump());
}

}  // namespace detail

inline Json to_json(const Rat& q) {
  Json j;
  j["num"] = detail::int_json(q.get_num());
  j["den"] = detail::int_json(q.get_den());
  return j;
}

/// Accepts {num, den}, an integer, or a string `p` / `p/q`.
inline Rat rat_from_json(const Json& j) {
  if (j.is_object()) {
    Rat q(detail::int_from_json(j.at("num")), detail::int_from_json(j.at("den")));
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator");
    q.canonicalize();
    return q;
  }
  if (j.is_number_integer()) return Rat(j.get<long>());
  if (j.is_string()) return parse_rat(j.get<std::string>());
  throw std::invalid_argument("expected a rational, got " + j.dump());
}

inline Json to_json(const AffineForm& f) {
  Json j;
  j["constant"] = to_json(f.constant());
  Json terms = Json::array();
  for (const auto& [v, c] : f.coeffs()) terms.push_back(Json{{"var", v}, {"coeff", to_json(c)}});
  j["terms"] = std::move(terms);
  return j;
}

inline Json to_json(const CellLevel& l) {
  Json j;
  j["var"] = l.var;
  if (l.lower) j["lower"] = to_json(*l.lower);
  if (l.upper) j["upper"] = to_json(*l.upper);
  j["modulus"] = detail::int_json(l.modulus);
  j["residue"] = detail::int_json(l.residue);
  return j;
}

inline Json to_json(const Cell& c) {
  Json j;
  j["params"] = c.num_params;
  Json levels = Json::array();
  for (const auto& l : c.levels) levels.push_back(to_json(l));
  j["levels"] = std::move(levels);
  j["formula"] = to_string(cell_to_formula(c));
  return j;
}

inline Json to_json(const Decomposition& d) {
  Json j;
  j["vars"] = d.vars;
  j["params"] = d.params;
  Json pieces = Json::array();
  for (const auto& p : d.pieces) {
    Json pj;
    pj["cell"] = to_json(p.cell);
    pj["part"] = p.part;
    Json rules = Json::array();
    for (const auto& fn : p.rules) {
      Json outs = Json::array();
      for (const auto& f : fn) outs.push_back(to_json(f));
      rules.push_back(std::move(outs));
    }
    pj["rules"] = std::move(rules);
    pieces.push_back(std::move(pj));
  }
  j["pieces"] = std::move(pieces);
  return j;
}

/// {r, s, bounds, pieces: [{cell, rule}]}, where a piece's cell is its
/// domain in X' and its rule the affine map onto X.
inline Json to_json(const NormalForm& nf) {
  Json j;
  j["r"] = nf.r;
  j["s"] = nf.s;
  j["vars"] = nf.vars;
  j["params"] = nf.params;
  j["coords"] = nf.coords;
  Json bounds = Json::array();
  for (const auto& b : nf.bounds) bounds.push_back(to_json(b));
  j["bounds"] = std::move(bounds);
  Json pieces = Json::array();
  for (const auto& p : nf.pieces) {
    Json pj;
    pj["rank"] = p.rank;
    pj["cell"] = to_string(p.domain);
    Json rule = Json::array();
    for (const auto& f : p.rule) rule.push_back(to_json(f));
    pj["rule"] = std::move(rule);
    pieces.push_back(std::move(pj));
  }
  j["pieces"] = std::move(pieces);
  return j;
}

// ---------------------------------------------------------------------------
// Extension groups

inline Json to_json(const ModelTuple& x) {
  Json j = Json::array();
  for (const auto& c : x) j.push_back(c.literal());
  return j;
}

inline Json to_json(const ExtElement& g) { return Json{{"u", to_json(g.u)}, {"x", to_json(g.x)}}; }

/// A model element from an integer or a literal string.
inline NonstdInt model_from_json(const Json& j, std::size_t levels) {
  if (j.is_number_integer()) return NonstdInt(levels, Int(j.get<long>()));
  if (j.is_string()) return NonstdInt::parse(j.get<std::string>(), levels);
  throw std::invalid_argument("expected a model element, got " + j.dump());
}

inline Json to_json(const ExtGroupSpec& spec) {
  Json j;
  j["s"] = spec.s();
  j["r"] = spec.r;
  j["a"] = to_json(spec.lattice.scale().a);
  Json b = Json::array();
  for (const auto& bi : spec.lattice.generators()) b.push_back(to_json(bi));
  j["b"] = std::move(b);
  Json v = Json::array();
  for (const auto& vi : spec.twists) v.push_back(to_json(vi));
  j["v"] = std::move(v);
  return j;
}

/// {s, r, a?, b, v}. `a` defaults to the standard scale; an entry of b_i
/// is either a model literal (containing `;`) or a rational q standing for
/// q * a_j; entries of v_i are model elements.
inline ExtGroupSpec ext_spec_from_json(const Json& j) {
  std::size_t s = j.at("s").get<std::size_t>();
  std::size_t r = j.at("r").get<std::size_t>();
  Scale scale = Scale::standard(s);
  if (j.contains("a") && !(j["a"].is_string() && j["a"] == "default")) {
    scale.a.clear();
    for (const auto& e : j.at("a")) scale.a.push_back(model_from_json(e, s));
    if (scale.a.size() != s) throw std::invalid_argument("scale needs s entries");
  }
  std::vector<ModelTuple> b;
  for (const auto& row : j.at("b")) {
    if (row.size() != s) throw std::invalid_argument("each generator needs s entries");
    ModelTuple bi;
    for (std::size_t k = 0; k < s; ++k) {
      const Json& e = row[k];
      if (e.is_string() && e.get<std::string>().find(';') != std::string::npos) {
        bi.push_back(NonstdInt::parse(e.get<std::string>(), s));
      } else {
        Rat q = rat_from_json(e);
        bi.push_back(lift(std::vector<Rat>{q}, Scale{{scale.a[k]}})[0]);
      }
    }
    b.push_back(std::move(bi));
  }
  std::vector<ModelTuple> v;
  for (const auto& row : j.at("v")) {
    ModelTuple vi;
    for (const auto& e : row) vi.push_back(model_from_json(e, s));
    v.push_back(std::move(vi));
  }
  if (r == 0 && v.empty()) v.assign(s, ModelTuple{});
  return ExtGroupSpec(r, LocalLattice(scale, std::move(b)), std::move(v));
}

/// Parses n model elements of M_levels written as in tuple_string:
/// `q1,...,qL;m, ...`.
inline ModelTuple parse_model_tuple(std::string_view text, std::size_t n, std::size_t levels) {
  std::vector<std::string> fields;
  std::string cur;
  bool any = false;
  for (char c : text) {
    if (c == ' ' || c == '(' || c == ')') continue;
    any = true;
    if (c == ',' || c == ';') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (any) fields.push_back(cur);
  // Each element contributes its L infinite parts and its finite part.
  if (fields.size() != n * (levels + 1))
    throw std::invalid_argument("expected " + std::to_string(n) + " model elements in '" + std::string(text) + "'");
  ModelTuple out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Rat> inf;
    for (std::size_t l = 0; l < levels; ++l) inf.push_back(parse_rat(fields[i * (levels + 1) + l]));
    out.emplace_back(std::move(inf), parse_int(fields[i * (levels + 1) + levels]));
  }
  return out;
}

/// Parses `(u | x)` as printed by ExtElement::to_string and reduces it.
inline ExtElement parse_ext_element(std::string_view text, const ExtGroupSpec& spec) {
  auto bar = text.find('|');
  if (bar == std::string_view::npos) throw std::invalid_argument("element needs the form (u | x)");
  ModelTuple u = parse_model_tuple(text.substr(0, bar), spec.r, spec.levels());
  ModelTuple x = parse_model_tuple(text.substr(bar + 1), spec.s(), spec.levels());
  if (!in_O(x, spec.lattice.scale())) throw std::invalid_argument("x-part is not in O(a)");
  return ext_make(u, x, spec);
}

}  // namespace presburger
