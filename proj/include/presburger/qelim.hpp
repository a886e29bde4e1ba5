// Quantifier elimination (Cooper's method), sentence decision, and DNF.
#pragma once

#include "presburger/normalize.hpp"
#include "presburger/semantics.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace presburger {

namespace detail {

// x := T/d in every atom, valid where d | T. Atoms are scaled by d first.
inline Formula substitute_scaled(const Formula& f, const std::string& x, const LinearTerm& num, const Int& den) {
  if (den == 1) return substitute(f, x, num);
  return map_atoms(f, [&](const Atom& a) {
    Int c = a.term.coeff(x);
    if (c == 0) return Formula::atom(a);
    LinearTerm t = num * c + a.term.without(x) * den;
    switch (a.kind) {
      case AtomKind::Eq:
        return Formula::eq(std::move(t));
      case AtomKind::Gt:
        return Formula::gt(std::move(t));
      case AtomKind::Div:
        return Formula::divides(a.modulus * den, std::move(t));
    }
    return Formula::atom(a);
  });
}

inline void collect_atoms(const Formula& f, std::vector<Atom>& out) {
  if (f.is_atom()) {
    out.push_back(f.atom());
    return;
  }
  for (const auto& k : f.kids()) collect_atoms(k, out);
}

// Equality among the top-level conjuncts with the smallest |coefficient| of x.
inline std::optional<std::size_t> pick_equality(const std::vector<Formula>& conj, const std::string& x) {
  std::optional<std::size_t> best;
  Int best_c;
  for (std::size_t i = 0; i < conj.size(); ++i) {
    const Formula& k = conj[i];
    if (!k.is_atom() || k.atom().kind != AtomKind::Eq) continue;
    Int c = abs(k.atom().term.coeff(x));
    if (c == 0) continue;
    if (!best || c < best_c) {
      best = i;
      best_c = c;
    }
  }
  return best;
}

// exists x. F, where F is normalized, quantifier-free, and mentions x.
inline Formula cooper_core(const std::string& x, const Formula& f) {
  // Equality shortcut: exists x. (c*x + s = 0 and G)  <=>  |c| | s and G[x := -s/c].
  std::vector<Formula> conj = f.kind() == Kind::And ? f.kids() : std::vector<Formula>{f};
  if (auto idx = pick_equality(conj, x)) {
    const LinearTerm& t = conj[*idx].atom().term;
    Int c = t.coeff(x);
    LinearTerm s = t.without(x);
    LinearTerm num = c > 0 ? -s : s;
    Int den = abs(c);
    std::vector<Formula> rest;
    for (std::size_t i = 0; i < conj.size(); ++i)
      if (i != *idx) rest.push_back(conj[i]);
    Formula g = normalize(substitute_scaled(Formula::conj(rest), x, num, den));
    return and_normalized({canonical_atom(Atom::div(den, s)), g});
  }

  // Harmonize coefficients of x to +-1 (x now stands for L*x).
  std::vector<Atom> atoms;
  collect_atoms(f, atoms);
  Int L = 1;
  for (const auto& a : atoms) {
    Int c = a.term.coeff(x);
    if (c != 0) L = lcm(L, abs(c));
  }
  Formula g = map_atoms(f, [&](const Atom& a) {
    Int c = a.term.coeff(x);
    if (c == 0) return Formula::atom(a);
    Int k = L / abs(c);
    LinearTerm t = LinearTerm::var(x, sgn(c)) + a.term.without(x) * k;
    switch (a.kind) {
      case AtomKind::Eq:
        return Formula::eq(std::move(t));
      case AtomKind::Gt:
        return Formula::gt(std::move(t));
      case AtomKind::Div:
        return Formula::divides(a.modulus * k, std::move(t));
    }
    return Formula::atom(a);
  });
  if (L > 1) g = Formula::conj({g, Formula::divides(L, LinearTerm::var(x))});

  // Test points. lower: x > b  (witness b + j); upper: x < a (witness a - j).
  std::set<LinearTerm> lower, upper;
  Int delta = 1;
  atoms.clear();
  collect_atoms(g, atoms);
  for (const auto& a : atoms) {
    Int c = a.term.coeff(x);
    if (c == 0) continue;
    LinearTerm r = a.term.without(x);
    switch (a.kind) {
      case AtomKind::Gt:
        if (c > 0) {
          lower.insert(-r);
        } else {
          upper.insert(r);
        }
        break;
      case AtomKind::Eq: {
        LinearTerm root = c > 0 ? -r : r;  // x = root
        lower.insert(root - LinearTerm(1));
        upper.insert(root + LinearTerm(1));
        break;
      }
      case AtomKind::Div:
        delta = lcm(delta, a.modulus);
        break;
    }
  }

  bool from_below = lower.size() <= upper.size();
  Formula inf = map_atoms(g, [&](const Atom& a) {
    Int c = a.term.coeff(x);
    if (c == 0 || a.kind == AtomKind::Div) return Formula::atom(a);
    if (a.kind == AtomKind::Eq) return Formula::falsity();
    // x > b is false at -infinity and true at +infinity.
    return Formula::constant((c > 0) != from_below);
  });
  inf = normalize(inf);
  const auto& points = from_below ? lower : upper;

  std::vector<Formula> out;
  for (Int j = 1; j <= delta; ++j) {
    LinearTerm jt = LinearTerm(from_below ? Int(j) : Int(-j));
    if (mentions(inf, x)) {
      out.push_back(normalize(substitute(inf, x, jt)));
    } else if (j == 1) {
      out.push_back(inf);
    }
    for (const auto& p : points) out.push_back(normalize(substitute(g, x, p + jt)));
    if (!out.empty() && out.back().is_true()) return Formula::truth();
  }
  return or_normalized(std::move(out));
}

// exists x. F for normalized quantifier-free F.
inline Formula exists_qf(const std::string& x, const Formula& f) {
  if (!mentions(f, x)) return f;
  if (f.kind() == Kind::Or) {
    std::vector<Formula> parts;
    for (const auto& k : f.kids()) {
      Formula e = exists_qf(x, k);
      if (e.is_true()) return e;
      parts.push_back(e);
    }
    return or_normalized(std::move(parts));
  }
  if (f.kind() == Kind::And) {
    std::vector<Formula> with, without;
    for (const auto& k : f.kids()) (mentions(k, x) ? with : without).push_back(k);
    if (!without.empty()) {
      Formula core = cooper_core(x, and_normalized(with));
      without.push_back(core);
      return and_normalized(std::move(without));
    }
  }
  return cooper_core(x, f);
}

inline Formula eliminate_rec(const Formula& f) {
  switch (f.kind()) {
    case Kind::True:
    case Kind::False:
    case Kind::Atom:
      return normalize(f);
    case Kind::Not:
      return normalize(Formula::neg(eliminate_rec(f.body())));
    case Kind::And:
    case Kind::Or: {
      std::vector<Formula> kids;
      for (const auto& k : f.kids()) kids.push_back(eliminate_rec(k));
      return f.kind() == Kind::And ? and_normalized(std::move(kids)) : or_normalized(std::move(kids));
    }
    case Kind::Exists:
      return exists_qf(f.var(), eliminate_rec(f.body()));
    case Kind::Forall: {
      Formula inner = normalize(Formula::neg(eliminate_rec(f.body())));
      return normalize(Formula::neg(exists_qf(f.var(), inner)));
    }
  }
  return f;
}

}  // namespace detail

/// Quantifier-free formula equivalent to `f` in every Z-group.
inline Formula eliminate(const Formula& f) { return detail::eliminate_rec(normalize(f)); }

/// exists x. f, eliminated.
inline Formula project(const Formula& f, const std::string& x) { return eliminate(Formula::exists(x, f)); }

inline Formula existential_closure(const Formula& f) {
  Formula g = f;
  for (const auto& v : free_vars(f)) g = Formula::exists(v, g);
  return g;
}

inline Formula universal_closure(const Formula& f) {
  Formula g = f;
  for (const auto& v : free_vars(f)) g = Formula::forall(v, g);
  return g;
}

/// Truth value of a sentence in Presburger arithmetic.
inline bool decide(const Formula& sentence) {
  auto fv = free_vars(sentence);
  if (!fv.empty()) throw std::invalid_argument("decide: free variable '" + *fv.begin() + "'");
  Formula r = eliminate(sentence);
  if (r.is_true()) return true;
  if (r.is_false()) return false;
  return eval(r, Assignment<Int>{});
}

using Conjunction = std::vector<Atom>;

namespace detail {

// Size estimate of the disjunction Cooper's method yields for x: an
// equality is nearly free, otherwise (period) * (test points + 1).
inline Int elimination_cost(const Conjunction& c, const std::string& x) {
  Int L = 1, eq;
  std::size_t lower = 0, upper = 0;
  for (const auto& a : c) {
    Int k = a.term.coeff(x);
    if (k == 0) continue;
    L = lcm(L, abs(k));
    if (a.kind == AtomKind::Eq && (eq == 0 || abs(k) < eq)) eq = abs(k);
    if (a.kind == AtomKind::Gt) ++(k > 0 ? lower : upper);
  }
  if (eq != 0) return eq - 1;
  Int delta = L;
  for (const auto& a : c) {
    Int k = a.term.coeff(x);
    if (k != 0 && a.kind == AtomKind::Div) delta = lcm(delta, a.modulus * (L / abs(k)));
  }
  return delta * Int(static_cast<long>(std::min(lower, upper) + 1));
}

// Search for a model of a normalized quantifier-free formula. Disjunctions
// are split lazily, conjunctions into variable-disjoint components, and the
// cheapest variable of a component is eliminated first. Formulas already
// decided are remembered.
class SatSearch {
 public:
  bool formula(const Formula& f) {
    if (f.is_true()) return true;
    if (f.is_false()) return false;
    if (auto it = memo_.find(f); it != memo_.end()) return it->second;
    bool out = decide_node(f);
    memo_.emplace(f, out);
    return out;
  }

 private:
  bool decide_node(const Formula& f) {
    auto vars = free_vars(f);
    if (vars.empty()) return eval(f, Assignment<Int>{});
    if (f.kind() == Kind::Or) {
      for (const auto& k : f.kids())
        if (formula(k)) return true;
      return false;
    }
    if (f.kind() == Kind::And) {
      auto parts = components(f);
      if (parts.size() > 1) {
        for (const auto& p : parts)
          if (!formula(p)) return false;
        return true;
      }
    }
    std::vector<Atom> atoms;
    collect_atoms(f, atoms);
    std::string best;
    Int best_cost;
    for (const auto& v : vars) {
      Int cost = elimination_cost(atoms, v);
      if (best.empty() || cost < best_cost) {
        best = v;
        best_cost = cost;
      }
    }
    return formula(exists_qf(best, f));
  }

  // Kids of a conjunction grouped by shared variables.
  static std::vector<Formula> components(const Formula& f) {
    const auto& kids = f.kids();
    std::vector<std::size_t> group(kids.size());
    std::vector<std::set<std::string>> vars;
    for (std::size_t i = 0; i < kids.size(); ++i) {
      group[i] = i;
      vars.push_back(free_vars(kids[i]));
    }
    std::function<std::size_t(std::size_t)> root = [&](std::size_t i) {
      return group[i] == i ? i : group[i] = root(group[i]);
    };
    for (std::size_t i = 0; i < kids.size(); ++i)
      for (std::size_t j = i + 1; j < kids.size(); ++j) {
        bool shared = std::any_of(vars[i].begin(), vars[i].end(), [&](const auto& v) { return vars[j].count(v) > 0; });
        if (shared) group[root(i)] = root(j);
      }
    std::map<std::size_t, std::vector<Formula>> by_root;
    for (std::size_t i = 0; i < kids.size(); ++i) by_root[root(i)].push_back(kids[i]);
    std::vector<Formula> out;
    for (auto& [r, fs] : by_root) out.push_back(and_normalized(std::move(fs)));
    return out;
  }

  std::map<Formula, bool> memo_;
};

}  // namespace detail

/// Is the formula satisfiable (over its free variables)?
inline bool satisfiable(const Formula& f) { return detail::SatSearch().formula(eliminate(f)); }

/// Is the formula valid (true for all values of its free variables)?
inline bool valid(const Formula& f) { return !satisfiable(normalize(Formula::neg(f))); }

namespace detail {

inline std::vector<Conjunction> dnf_rec(const Formula& f) {
  switch (f.kind()) {
    case Kind::True:
      return {Conjunction{}};
    case Kind::False:
      return {};
    case Kind::Atom:
      return {Conjunction{f.atom()}};
    case Kind::Not: {
      // not N | t  <=>  N | t - r for some r in 1..N-1
      const Atom& a = f.body().atom();
      std::vector<Conjunction> out;
      for (Int r = 1; r < a.modulus; ++r) {
        Formula c = canonical_atom(Atom::div(a.modulus, a.term - LinearTerm(r)));
        if (c.is_true()) return {Conjunction{}};
        if (!c.is_false()) out.push_back({c.atom()});
      }
      return out;
    }
    case Kind::Or: {
      std::vector<Conjunction> out;
      for (const auto& k : f.kids()) {
        auto d = dnf_rec(k);
        out.insert(out.end(), d.begin(), d.end());
      }
      return out;
    }
    case Kind::And: {
      std::vector<Conjunction> acc{Conjunction{}};
      for (const auto& k : f.kids()) {
        auto d = dnf_rec(k);
        std::vector<Conjunction> next;
        for (const auto& a : acc)
          for (const auto& b : d) {
            Conjunction c = a;
            c.insert(c.end(), b.begin(), b.end());
            next.push_back(std::move(c));
          }
        acc = std::move(next);
        if (acc.empty()) break;
      }
      return acc;
    }
    default:
      throw std::invalid_argument("dnf requires a quantifier-free formula");
  }
}

}  // namespace detail

inline Formula to_formula(const Conjunction& c) {
  std::vector<Formula> kids;
  for (const auto& a : c) kids.push_back(Formula::atom(a));
  return Formula::conj(std::move(kids));
}

/// Simplified conjunction, or nullopt when it folds to false.
inline std::optional<Conjunction> simplify_conjunction(const Conjunction& c) {
  std::vector<Formula> kids;
  for (const auto& a : c) {
    Formula k = canonical_atom(a);
    if (k.is_false()) return std::nullopt;
    kids.push_back(k);
  }
  Formula s = and_normalized(std::move(kids));
  if (s.is_false()) return std::nullopt;
  Conjunction out;
  if (s.is_atom()) {
    out.push_back(s.atom());
  } else if (s.kind() == Kind::And) {
    for (const auto& k : s.kids()) out.push_back(k.atom());
  }
  return out;
}

/// Disjunctive normal form of a quantifier-free formula. Negated
/// divisibility is expanded into residues; unsatisfiable disjuncts are
/// dropped (each survivor passes `satisfiable`).
inline std::vector<Conjunction> dnf(const Formula& f) {
  if (!is_quantifier_free(f)) throw std::invalid_argument("dnf requires a quantifier-free formula");
  std::vector<Conjunction> out;
  std::set<Formula> seen;
  for (const auto& c : detail::dnf_rec(normalize(f))) {
    auto s = simplify_conjunction(c);
    if (!s) continue;
    Formula key = to_formula(*s);
    if (!seen.insert(key).second) continue;
    if (!satisfiable(key)) continue;
    out.push_back(std::move(*s));
  }
  return out;
}

}  // namespace presburger
