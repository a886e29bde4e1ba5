// Cells and cell decomposition with linearization of definable functions.
//
// A cell over coordinates (c_1, ..., c_n) is built level by level: level i
// constrains c_i by an optional strict lower bound f, an optional strict
// upper bound g (affine in c_1..c_{i-1}, integer valued on the cell below)
// and a congruence c_i = k mod N. When both bounds are present the cell
// below forces g - f > N. Parameters are the leading coordinates.
#pragma once

#include "presburger/affine.hpp"
#include "presburger/qelim.hpp"
#include "presburger/syntax.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace presburger {

struct CellLevel {
  std::string var;
  std::optional<AffineForm> lower;
  std::optional<AffineForm> upper;
  Int modulus = 1;
  Int residue = 0;

  /// Exactly one value: lower + 1 = upper - 1 with modulus 1.
  bool is_point() const { return lower && upper && modulus == 1 && *upper - *lower == AffineForm(Rat(2)); }
};

struct Cell {
  std::vector<CellLevel> levels;
  std::size_t num_params = 0;

  std::vector<std::string> coords() const {
    std::vector<std::string> out;
    for (const auto& l : levels) out.push_back(l.var);
    return out;
  }
  std::size_t arity() const { return levels.size() - num_params; }
};

inline Formula level_to_formula(const CellLevel& l) {
  LinearTerm y = LinearTerm::var(l.var);
  std::vector<Formula> parts;
  if (l.lower) parts.push_back(above(y, *l.lower));
  if (l.upper) parts.push_back(below(y, *l.upper));
  if (l.modulus > 1) parts.push_back(Formula::divides(l.modulus, y - LinearTerm(l.residue)));
  return normalize(Formula::conj(std::move(parts)));
}

/// Quantifier-free formula of the first `upto` levels (all by default).
inline Formula cell_to_formula(const Cell& c, std::size_t upto = SIZE_MAX) {
  std::vector<Formula> parts;
  for (std::size_t i = 0; i < c.levels.size() && i < upto; ++i) parts.push_back(level_to_formula(c.levels[i]));
  return and_normalized(std::move(parts));
}

/// Graph of a definable function: `graph` relates the decomposed
/// coordinates to `outputs`.
struct FunctionSpec {
  Formula graph;
  std::vector<std::string> outputs;
};

struct CellPiece {
  Cell cell;
  std::size_t part = 0;                          // index into the refinement
  std::vector<std::vector<AffineForm>> rules;    // per function, per output
};

struct Decomposition {
  std::vector<std::string> params;
  std::vector<std::string> vars;
  std::vector<CellPiece> pieces;
};

class DecomposeError : public std::invalid_argument {
 public:
  DecomposeError(const std::string& what, const Formula& sentence)
      : std::invalid_argument(what + ": " + to_string(sentence)), sentence_(sentence) {}
  const Formula& sentence() const { return sentence_; }

 private:
  Formula sentence_;
};

namespace detail {

/// Disjoint alternatives for the negation of an atom.
inline std::vector<Conjunction> negated_literal(const Atom& a) {
  switch (a.kind) {
    case AtomKind::Gt:
      return {{Atom::gt(-a.term + LinearTerm(1))}};
    case AtomKind::Eq:
      return {{Atom::gt(a.term)}, {Atom::gt(-a.term)}};
    case AtomKind::Div: {
      std::vector<Conjunction> out;
      for (Int r = 1; r < a.modulus; ++r) out.push_back({Atom::div(a.modulus, a.term - LinearTerm(r))});
      return out;
    }
  }
  return {};
}

class CellBuilder {
 public:
  using Prefix = std::vector<CellLevel>;

  CellBuilder(std::vector<std::string> coords, std::size_t exact_from)
      : coords_(std::move(coords)), exact_from_(exact_from) {}

  /// Pairwise disjoint conjunctions whose union is `f` (quantifier-free).
  std::vector<Conjunction> disjoint_dnf(const Formula& f) {
    std::vector<Conjunction> out;
    split(normalize(f), {}, out);
    return out;
  }

  /// Cells partitioning the set of the conjunction over the first n coordinates.
  std::vector<Prefix> process(const Conjunction& conj, std::size_t n) {
    if (n == 0) return {Prefix{}};
    const std::string& y = coords_[n - 1];
    bool exact = n - 1 >= exact_from_;
    Conjunction rest, with;
    for (const auto& a : conj) (a.has(y) ? with : rest).push_back(a);
    std::vector<Prefix> out;
    if (with.empty()) {
      if (exact) throw DecomposeError("function output is not determined", to_formula(conj));
      CellLevel free_level;
      free_level.var = y;
      emit(rest, n, free_level, out);
      return out;
    }
    if (auto eq = pick_equality(with, y)) {
      equality_case(*eq, with, rest, n, out);
      return out;
    }
    Int m = 1;
    for (const auto& a : with)
      if (a.kind == AtomKind::Div) m = lcm(m, a.modulus);
    for (Int k = 0; k < m; ++k) bounds_case(with, rest, n, m, k, exact, out);
    return out;
  }

 private:
  bool sat(const Conjunction& c) {
    Formula key = to_formula(c);
    auto it = sat_cache_.find(key);
    if (it != sat_cache_.end()) return it->second;
    bool r = satisfiable(key);
    sat_cache_.emplace(key, r);
    return r;
  }

  // base extended by extra literals, simplified; nullopt when empty.
  std::optional<Conjunction> extend(const Conjunction& base, const std::vector<Formula>& extra) {
    Conjunction c = base;
    for (const auto& f : extra) {
      Formula n = normalize(f);
      if (n.is_false()) return std::nullopt;
      if (n.is_true()) continue;
      if (!n.is_atom()) throw std::logic_error("cell builder: non-atomic condition " + to_string(n));
      c.push_back(n.atom());
    }
    auto s = simplify_conjunction(c);
    if (!s || !sat(*s)) return std::nullopt;
    return s;
  }

  void split(const Formula& f, const Conjunction& acc, std::vector<Conjunction>& out) {
    if (f.is_false()) return;
    std::vector<Formula> lits = f.kind() == Kind::And ? f.kids() : std::vector<Formula>{f};
    if (f.is_true() || std::all_of(lits.begin(), lits.end(), [](const Formula& k) { return k.is_atom(); })) {
      std::vector<Formula> extra = f.is_true() ? std::vector<Formula>{} : lits;
      if (auto c = extend(acc, extra)) out.push_back(*c);
      return;
    }
    std::vector<Atom> atoms;
    collect_atoms(f, atoms);
    const Atom pivot = atoms.front();
    auto assign = [&](bool value) {
      return normalize(map_atoms(f, [&](const Atom& a) {
        return a.kind == pivot.kind && a.modulus == pivot.modulus && a.term == pivot.term ? Formula::constant(value)
                                                                                           : Formula::atom(a);
      }));
    };
    if (auto c = extend(acc, {Formula::atom(pivot)})) split(assign(true), *c, out);
    Formula f0 = assign(false);
    for (const auto& alt : negated_literal(pivot)) {
      std::vector<Formula> extra;
      for (const auto& a : alt) extra.push_back(Formula::atom(a));
      if (auto c = extend(acc, extra)) split(f0, *c, out);
    }
  }

  void emit(const Conjunction& parent, std::size_t n, const CellLevel& level, std::vector<Prefix>& out) {
    auto c = extend(parent, {});
    if (!c) return;
    for (auto& p : process(*c, n - 1)) {
      p.push_back(level);
      out.push_back(std::move(p));
    }
  }

  static std::optional<std::size_t> pick_equality(const Conjunction& with, const std::string& y) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < with.size(); ++i) {
      if (with[i].kind != AtomKind::Eq) continue;
      if (!best || abs(with[i].term.coeff(y)) < abs(with[*best].term.coeff(y)) ||
          (abs(with[i].term.coeff(y)) == abs(with[*best].term.coeff(y)) && compare(with[i], with[*best]) < 0))
        best = i;
    }
    return best;
  }

  // c*y + r = 0: y = -r/c, integral when |c| divides r.
  void equality_case(std::size_t idx, const Conjunction& with, const Conjunction& rest, std::size_t n,
                     std::vector<Prefix>& out) {
    const std::string& y = coords_[n - 1];
    const LinearTerm& t = with[idx].term;
    Int c = t.coeff(y);
    LinearTerm r = t.without(y);
    LinearTerm num = c > 0 ? -r : r;
    Int den = abs(c);
    std::vector<Formula> extra{Formula::divides(den, r)};
    for (std::size_t i = 0; i < with.size(); ++i) {
      if (i == idx) continue;
      extra.push_back(substitute_scaled(Formula::atom(with[i]), y, num, den));
    }
    auto parent = extend(rest, extra);
    if (!parent) return;
    AffineForm root(num, den);
    emit(*parent, n, CellLevel{y, root - AffineForm(Rat(1)), root + AffineForm(Rat(1)), 1, 0}, out);
  }

  // Choice of the binding bound among candidates: the i-th wins when it is
  // strictly beyond the earlier ones and at least as far as the later ones.
  static std::vector<Formula> winner_conditions(const std::vector<AffineForm>& cands, std::size_t i, bool is_lower) {
    std::vector<Formula> out;
    for (std::size_t j = 0; j < cands.size(); ++j) {
      if (j == i) continue;
      const AffineForm& a = is_lower ? cands[i] : cands[j];
      const AffineForm& b = is_lower ? cands[j] : cands[i];
      out.push_back(j < i ? greater(a, b) : greater_eq(a, b));
    }
    return out;
  }

  // Integer-valued replacements of a rational bound: floor for lower
  // bounds, ceiling for upper bounds, one per residue of the numerator.
  static std::vector<std::pair<Formula, AffineForm>> integer_bounds(const AffineForm& b, bool is_lower) {
    auto [num, den] = b.cleared();
    if (den == 1) return {{Formula::truth(), b}};
    std::vector<std::pair<Formula, AffineForm>> out;
    for (Int rho = 0; rho < den; ++rho) {
      LinearTerm shifted = is_lower ? num - LinearTerm(rho) : num + LinearTerm(rho);
      out.emplace_back(Formula::divides(den, shifted), AffineForm(shifted, den));
    }
    return out;
  }

  void bounds_case(const Conjunction& with, const Conjunction& rest, std::size_t n, const Int& m, const Int& k, bool exact,
                   std::vector<Prefix>& out) {
    const std::string& y = coords_[n - 1];
    std::set<AffineForm> lower_set, upper_set;
    std::vector<Formula> extra;
    for (const auto& a : with) {
      Int c = a.term.coeff(y);
      LinearTerm r = a.term.without(y);
      switch (a.kind) {
        case AtomKind::Gt:
          if (c > 0) {
            lower_set.insert(AffineForm(-r, c));
          } else {
            upper_set.insert(AffineForm(r, -c));
          }
          break;
        case AtomKind::Div:
          extra.push_back(Formula::divides(a.modulus, r + LinearTerm(c * k)));
          break;
        case AtomKind::Eq:
          break;
      }
    }
    auto base = extend(rest, extra);
    if (!base) return;
    std::vector<AffineForm> lowers(lower_set.begin(), lower_set.end());
    std::vector<AffineForm> uppers(upper_set.begin(), upper_set.end());
    if (exact && (lowers.empty() || uppers.empty()))
      throw DecomposeError("function output is not bounded", to_formula(with));

    auto for_choice = [&](const std::vector<AffineForm>& cands, bool is_lower, const Conjunction& from, auto&& next) {
      if (cands.empty()) {
        next(from, std::optional<AffineForm>{});
        return;
      }
      for (std::size_t i = 0; i < cands.size(); ++i) {
        auto chosen = extend(from, winner_conditions(cands, i, is_lower));
        if (!chosen) continue;
        for (const auto& [cond, bound] : integer_bounds(cands[i], is_lower)) {
          auto c = extend(*chosen, {cond});
          if (c) next(*c, std::optional<AffineForm>(bound));
        }
      }
    };

    for_choice(lowers, true, *base, [&](const Conjunction& after_lower, const std::optional<AffineForm>& f) {
      for_choice(uppers, false, after_lower, [&](const Conjunction& parent, const std::optional<AffineForm>& g) {
        if (!f || !g) {
          emit(parent, n, CellLevel{y, f, g, m, k}, out);
          return;
        }
        AffineForm width = *g - *f;
        if (!exact) {
          if (auto wide = extend(parent, {greater(width, AffineForm(Rat(m)))}))
            emit(*wide, n, CellLevel{y, f, g, m, k}, out);
        }
        std::vector<Formula> narrow;
        if (!exact) narrow.push_back(greater_eq(AffineForm(Rat(m)), width));
        auto thin = extend(parent, narrow);
        if (!thin) return;
        // y = f + j for the j in 1..m with f + j = k mod m.
        for (Int j = 1; j <= m; ++j) {
          AffineForm point = *f + AffineForm(Rat(j));
          auto c = extend(*thin, {greater(width, AffineForm(Rat(j))), divides_form(m, point - AffineForm(Rat(k)))});
          if (c) emit(*c, n, CellLevel{y, point - AffineForm(Rat(1)), point + AffineForm(Rat(1)), 1, 0}, out);
        }
      });
    });
  }

  std::vector<std::string> coords_;
  std::size_t exact_from_;
  std::map<Formula, bool> sat_cache_;
};

inline void check_vars(const Formula& f, const std::set<std::string>& allowed, const char* what) {
  for (const auto& v : free_vars(f))
    if (!allowed.count(v)) throw std::invalid_argument(std::string(what) + " mentions undeclared variable '" + v + "'");
}

inline std::string cell_key(const Cell& c) { return to_string(cell_to_formula(c)); }

}  // namespace detail

/// Cell decomposition of B (over params followed by vars) refining the
/// partition `refine` of B, on whose cells every function in `funcs` is
/// affine. An empty refinement means the trivial one.
inline Decomposition decompose(const Formula& B, const std::vector<Formula>& refine, const std::vector<FunctionSpec>& funcs,
                               const std::vector<std::string>& vars, const std::vector<std::string>& params = {}) {
  std::vector<std::string> coords = params;
  coords.insert(coords.end(), vars.begin(), vars.end());
  std::set<std::string> allowed(coords.begin(), coords.end());
  if (allowed.size() != coords.size()) throw std::invalid_argument("duplicate coordinate names");
  detail::check_vars(B, allowed, "set");
  for (const auto& a : refine) detail::check_vars(a, allowed, "refinement part");

  std::vector<std::string> outputs;
  for (const auto& fn : funcs) {
    std::set<std::string> scope = allowed;
    for (const auto& o : fn.outputs) {
      if (allowed.count(o) || std::find(outputs.begin(), outputs.end(), o) != outputs.end())
        throw std::invalid_argument("output '" + o + "' clashes with another coordinate");
      outputs.push_back(o);
      scope.insert(o);
    }
    detail::check_vars(fn.graph, scope, "function graph");
  }

  Formula b = eliminate(B);
  std::vector<Formula> parts = refine.empty() ? std::vector<Formula>{Formula::truth()} : refine;
  for (auto& p : parts) p = eliminate(p);

  // Preconditions.
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      Formula overlap = existential_closure(Formula::conj({b, parts[i], parts[j]}));
      if (decide(overlap)) throw DecomposeError("refinement parts overlap", overlap);
    }
  {
    Formula cover = universal_closure(Formula::implies(b, Formula::disj(parts)));
    if (!decide(cover)) throw DecomposeError("refinement does not cover the set", cover);
  }
  for (const auto& fn : funcs) {
    Formula exists_out = fn.graph;
    for (auto it = fn.outputs.rbegin(); it != fn.outputs.rend(); ++it) exists_out = Formula::exists(*it, exists_out);
    Formula total = universal_closure(Formula::implies(b, exists_out));
    if (!decide(total)) throw DecomposeError("function is not total on the set", total);
    std::set<std::string> used = all_vars(fn.graph);
    used.insert(allowed.begin(), allowed.end());
    std::map<std::string, std::string> primed;
    std::vector<Formula> same;
    for (const auto& o : fn.outputs) {
      std::string p = fresh_name(o + "_", used);
      used.insert(p);
      primed[o] = p;
      same.push_back(Formula::eq(LinearTerm::var(o) - LinearTerm::var(p)));
    }
    Formula unique = universal_closure(
        Formula::implies(Formula::conj({b, fn.graph, rename_free(fn.graph, primed)}), Formula::conj(same)));
    if (!decide(unique)) throw DecomposeError("function is not single valued", unique);
  }

  std::vector<std::string> all = coords;
  all.insert(all.end(), outputs.begin(), outputs.end());
  Decomposition out{params, vars, {}};
  for (std::size_t p = 0; p < parts.size(); ++p) {
    std::vector<Formula> gamma{b, parts[p]};
    for (const auto& fn : funcs) gamma.push_back(fn.graph);
    detail::CellBuilder builder(all, coords.size());
    for (const auto& conj : builder.disjoint_dnf(eliminate(Formula::conj(gamma)))) {
      for (auto& prefix : builder.process(conj, all.size())) {
        CellPiece piece;
        piece.part = p;
        piece.cell.num_params = params.size();
        piece.cell.levels.assign(prefix.begin(), prefix.begin() + coords.size());
        // Output levels are points lower + 1; earlier outputs are substituted.
        std::map<std::string, AffineForm> value;
        for (std::size_t i = coords.size(); i < all.size(); ++i) {
          AffineForm v = *prefix[i].lower + AffineForm(Rat(1));
          for (const auto& [name, val] : value) v = v.substitute(name, val);
          value[all[i]] = v;
        }
        for (const auto& fn : funcs) {
          std::vector<AffineForm> rule;
          for (const auto& o : fn.outputs) rule.push_back(value.at(o));
          piece.rules.push_back(std::move(rule));
        }
        out.pieces.push_back(std::move(piece));
      }
    }
  }
  std::stable_sort(out.pieces.begin(), out.pieces.end(), [](const CellPiece& a, const CellPiece& c) {
    std::string ka = detail::cell_key(a.cell), kc = detail::cell_key(c.cell);
    return ka != kc ? ka < kc : a.part < c.part;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Certificates

struct CellReport {
  bool pass = true;
  std::size_t checks = 0;
  std::vector<std::string> failures;

  void check(bool ok, const std::string& what) {
    ++checks;
    if (!ok) {
      pass = false;
      failures.push_back(what);
    }
  }
};

namespace detail {

// Is B covered by the cells? Searches for a point of B outside every cell,
// branching on the disjoint negation of each cell that meets the region.
inline bool covered(const Conjunction& region, const std::vector<Formula>& cells, std::size_t from) {
  for (std::size_t i = from; i < cells.size(); ++i) {
    Formula meet = and_normalized({to_formula(region), cells[i]});
    if (meet.is_false() || !satisfiable(meet)) continue;
    std::vector<Atom> lits;
    collect_atoms(cells[i], lits);
    // not (a1 and ... and an) = not a1 or (a1 and not a2) or ...
    Conjunction prefix = region;
    for (const auto& a : lits) {
      for (const auto& alt : negated_literal(a)) {
        Conjunction c = prefix;
        c.insert(c.end(), alt.begin(), alt.end());
        auto s = simplify_conjunction(c);
        if (s && satisfiable(to_formula(*s)) && !covered(*s, cells, i + 1)) return false;
      }
      prefix.push_back(a);
      auto s = simplify_conjunction(prefix);
      if (!s) break;
      prefix = *s;
    }
    return true;
  }
  return !satisfiable(to_formula(region));
}

inline bool holds(const Formula& f) { return valid(f); }

// Two cells are disjoint when some pair of their level prefixes is. Prefix
// pairs are checked from the bottom up and remembered across calls.
class DisjointnessCheck {
 public:
  bool disjoint(const Cell& a, const Cell& b) {
    std::size_t n = std::max(a.levels.size(), b.levels.size());
    for (std::size_t l = 1; l <= n; ++l) {
      Formula pa = cell_to_formula(a, l), pb = cell_to_formula(b, l);
      if (pa == pb) continue;
      auto key = std::make_pair(pa, pb);
      auto it = seen_.find(key);
      if (it == seen_.end()) it = seen_.emplace(key, !satisfiable(Formula::conj({pa, pb}))).first;
      if (it->second) return true;
    }
    return false;
  }

 private:
  std::map<std::pair<Formula, Formula>, bool> seen_;
};

}  // namespace detail

/// Decide-certified checks of a decomposition: gap and integrality of every
/// level, pairwise disjointness, containment in B and the refinement part,
/// coverage of B, and agreement of each rule with its function graph.
inline CellReport certify(const Decomposition& d, const Formula& B, const std::vector<Formula>& refine,
                          const std::vector<FunctionSpec>& funcs) {
  CellReport rep;
  Formula b = eliminate(B);
  std::vector<Formula> cells;
  for (const auto& piece : d.pieces) cells.push_back(cell_to_formula(piece.cell));
  detail::DisjointnessCheck apart;
  for (std::size_t i = 0; i < d.pieces.size(); ++i) {
    const Cell& c = d.pieces[i].cell;
    std::string name = "cell " + std::to_string(i);
    for (std::size_t l = 0; l < c.levels.size(); ++l) {
      const CellLevel& lv = c.levels[l];
      Formula below_cell = cell_to_formula(c, l);
      if (lv.lower) rep.check(detail::holds(Formula::implies(below_cell, integral(*lv.lower))), name + ": lower bound not integral at level " + std::to_string(l));
      if (lv.upper) rep.check(detail::holds(Formula::implies(below_cell, integral(*lv.upper))), name + ": upper bound not integral at level " + std::to_string(l));
      if (lv.lower && lv.upper)
        rep.check(detail::holds(Formula::implies(below_cell, greater(*lv.upper - *lv.lower, AffineForm(Rat(lv.modulus))))),
                  name + ": gap condition fails at level " + std::to_string(l));
    }
    Formula part = refine.empty() ? Formula::truth() : refine.at(d.pieces[i].part);
    rep.check(detail::holds(Formula::implies(cells[i], Formula::conj({b, part}))), name + ": not contained in its part");
    for (std::size_t j = i + 1; j < d.pieces.size(); ++j)
      rep.check(apart.disjoint(c, d.pieces[j].cell), "cells " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
    for (std::size_t f = 0; f < funcs.size() && f < d.pieces[i].rules.size(); ++f) {
      Formula g = funcs[f].graph;
      std::vector<Formula> integ;
      const auto& rule = d.pieces[i].rules[f];
      for (std::size_t o = 0; o < funcs[f].outputs.size(); ++o) {
        auto [num, den] = rule[o].cleared();
        g = normalize(detail::substitute_scaled(eliminate(g), funcs[f].outputs[o], num, den));
        integ.push_back(integral(rule[o]));
      }
      integ.push_back(g);
      rep.check(detail::holds(Formula::implies(cells[i], Formula::conj(integ))), name + ": rule disagrees with function " + std::to_string(f));
    }
  }
  bool cov = true;
  for (const auto& conj : dnf(b)) cov = cov && detail::covered(conj, cells, 0);
  rep.check(cov, "cells do not cover the set");
  return rep;
}

}  // namespace presburger
