// Normalization: NNF, atom canonicalization, constant folding and cheap
// bound merging inside conjunctions and disjunctions.
#pragma once

#include "presburger/formula.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace presburger {

/// Canonical form of an atom. Returns true/false when the atom folds.
inline Formula canonical_atom(const Atom& a) {
  const LinearTerm& t = a.term;
  switch (a.kind) {
    case AtomKind::Gt: {
      if (t.is_constant()) return Formula::constant(t.constant() > 0);
      Int g = t.content();
      if (g == 1) return Formula::atom(a);
      // g*t' + c > 0  <=>  t' + ceil(c/g) > 0
      LinearTerm out;
      for (const auto& [v, c] : t.coeffs()) out += LinearTerm::var(v, c / g);
      out += LinearTerm(ceil(Rat(t.constant(), g)));
      return Formula::gt(std::move(out));
    }
    case AtomKind::Eq: {
      if (t.is_constant()) return Formula::constant(t.constant() == 0);
      Int g = t.content();
      if (!divides(g, t.constant())) return Formula::falsity();
      if (t.coeffs().begin()->second < 0) g = -g;
      if (g == 1) return Formula::atom(a);
      LinearTerm out;
      for (const auto& [v, c] : t.coeffs()) out += LinearTerm::var(v, c / g);
      out += LinearTerm(Int(t.constant() / g));
      return Formula::eq(std::move(out));
    }
    case AtomKind::Div: {
      const Int& n = a.modulus;
      if (n == 1) return Formula::truth();
      LinearTerm red;
      for (const auto& [v, c] : t.coeffs()) red += LinearTerm::var(v, mod(c, n));
      red += LinearTerm(mod(t.constant(), n));
      if (red.is_constant()) return Formula::constant(red.constant() == 0);
      Int g = gcd(red.content(), n);
      if (g != 1) {
        if (!divides(g, red.constant())) return Formula::falsity();
        LinearTerm out;
        for (const auto& [v, c] : red.coeffs()) out += LinearTerm::var(v, c / g);
        out += LinearTerm(Int(red.constant() / g));
        Int m = n / g;
        if (m == 1) return Formula::truth();
        return canonical_atom(Atom::div(m, std::move(out)));
      }
      return Formula::divides(n, std::move(red));
    }
  }
  return Formula::atom(a);
}

namespace detail {

inline Formula simplify_and(std::vector<Formula> kids);
inline Formula simplify_or(std::vector<Formula> kids);

inline void sort_unique(std::vector<Formula>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Key of a Gt/Eq atom: its variable part.
inline LinearTerm linear_part(const Atom& a) { return a.term.without_constant(); }

// Conjunction of canonical children. Gt atoms sharing a linear part keep the
// strongest bound, opposite bounds are checked for emptiness and collapsed to
// an equality when they pin a single value.
inline Formula simplify_and(std::vector<Formula> kids) {
  std::vector<Formula> flat;
  for (auto& k : kids) {
    if (k.is_false()) return Formula::falsity();
    if (k.is_true()) continue;
    if (k.kind() == Kind::And) {
      for (const auto& kk : k.kids()) flat.push_back(kk);
    } else {
      flat.push_back(std::move(k));
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    // lower[L] = min c over Gt(L + c); eqs[L] = e for Eq(L + e)
    std::map<LinearTerm, Int> lower, eqs;
    std::vector<Formula> other;
    for (const auto& k : flat) {
      if (k.is_atom() && k.atom().kind == AtomKind::Gt) {
        LinearTerm l = linear_part(k.atom());
        auto [it, ins] = lower.try_emplace(l, k.atom().term.constant());
        if (!ins) {
          changed |= it->second != k.atom().term.constant();
          if (k.atom().term.constant() < it->second) it->second = k.atom().term.constant();
        }
      } else if (k.is_atom() && k.atom().kind == AtomKind::Eq) {
        LinearTerm l = linear_part(k.atom());
        auto [it, ins] = eqs.try_emplace(l, k.atom().term.constant());
        if (!ins && it->second != k.atom().term.constant()) return Formula::falsity();
      } else {
        other.push_back(k);
      }
    }
    // Equalities absorb compatible bounds on the same linear part.
    for (const auto& [l, e] : eqs) {
      // L = -e
      if (auto it = lower.find(l); it != lower.end()) {
        if (-e + it->second <= 0) return Formula::falsity();
        lower.erase(it);
        changed = true;
      }
      LinearTerm nl = -l;
      if (auto it = lower.find(nl); it != lower.end()) {
        // -L + c > 0  <=>  e + c > 0
        if (e + it->second <= 0) return Formula::falsity();
        lower.erase(it);
        changed = true;
      }
    }
    // Opposite bounds: L > -c1 and L < c2.
    std::vector<std::pair<LinearTerm, Int>> new_eqs;
    for (auto it = lower.begin(); it != lower.end();) {
      LinearTerm nl = -it->first;
      auto jt = lower.find(nl);
      if (jt != lower.end() && it->first < nl) {
        Int s = it->second + jt->second;
        if (s <= 1) return Formula::falsity();
        if (s == 2) {
          // L = 1 - c1
          new_eqs.emplace_back(it->first, it->second - 1);
          lower.erase(jt);
          it = lower.erase(it);
          changed = true;
          continue;
        }
      }
      ++it;
    }
    flat = std::move(other);
    for (const auto& [l, c] : lower) flat.push_back(Formula::gt(l + LinearTerm(c)));
    for (const auto& [l, e] : eqs) flat.push_back(Formula::eq(l + LinearTerm(e)));
    for (const auto& [l, e] : new_eqs) {
      Formula c = canonical_atom(Atom::eq(l + LinearTerm(e)));
      if (c.is_false()) return c;
      if (!c.is_true()) flat.push_back(c);
    }
    // p and not p
    for (const auto& k : flat) {
      if (k.kind() == Kind::Not) {
        for (const auto& j : flat)
          if (j == k.body()) return Formula::falsity();
      }
    }
  }
  sort_unique(flat);
  return Formula::conj(std::move(flat));
}

inline Formula simplify_or(std::vector<Formula> kids) {
  std::vector<Formula> flat;
  for (auto& k : kids) {
    if (k.is_true()) return Formula::truth();
    if (k.is_false()) continue;
    if (k.kind() == Kind::Or) {
      for (const auto& kk : k.kids()) flat.push_back(kk);
    } else {
      flat.push_back(std::move(k));
    }
  }
  // Gt atoms sharing a linear part keep the weakest bound.
  std::map<LinearTerm, Int> lower;
  std::vector<Formula> other;
  for (const auto& k : flat) {
    if (k.is_atom() && k.atom().kind == AtomKind::Gt) {
      LinearTerm l = linear_part(k.atom());
      auto [it, ins] = lower.try_emplace(l, k.atom().term.constant());
      if (!ins && k.atom().term.constant() > it->second) it->second = k.atom().term.constant();
    } else {
      other.push_back(k);
    }
  }
  for (const auto& [l, c] : lower) {
    auto jt = lower.find(-l);
    if (jt != lower.end() && c + jt->second >= 1) return Formula::truth();
  }
  flat = std::move(other);
  for (const auto& [l, c] : lower) flat.push_back(Formula::gt(l + LinearTerm(c)));
  // Divisibility atoms covering every residue of one term.
  std::map<std::pair<Int, LinearTerm>, std::set<Int>> residues;
  for (const auto& k : flat) {
    if (k.kind() == Kind::Not) {
      for (const auto& j : flat)
        if (j == k.body()) return Formula::truth();
    }
    if (k.is_atom() && k.atom().kind == AtomKind::Div) {
      const Atom& a = k.atom();
      auto& r = residues[{a.modulus, linear_part(a)}];
      r.insert(mod(a.term.constant(), a.modulus));
      if (Int(r.size()) == a.modulus) return Formula::truth();
    }
  }
  sort_unique(flat);
  return Formula::disj(std::move(flat));
}

inline Formula normalize_nnf(const Formula& f, bool negated);

inline Formula normalize_atom(const Atom& a, bool negated) {
  Formula c = canonical_atom(a);
  if (!negated) return c;
  if (c.is_true()) return Formula::falsity();
  if (c.is_false()) return Formula::truth();
  const Atom& ca = c.atom();
  switch (ca.kind) {
    case AtomKind::Gt:
      return canonical_atom(Atom::gt(-ca.term + LinearTerm(1)));
    case AtomKind::Eq:
      return simplify_or({canonical_atom(Atom::gt(ca.term)), canonical_atom(Atom::gt(-ca.term))});
    case AtomKind::Div:
      return Formula::neg(c);
  }
  return c;
}

inline Formula normalize_nnf(const Formula& f, bool negated) {
  switch (f.kind()) {
    case Kind::True:
      return Formula::constant(!negated);
    case Kind::False:
      return Formula::constant(negated);
    case Kind::Atom:
      return normalize_atom(f.atom(), negated);
    case Kind::Not:
      return normalize_nnf(f.body(), !negated);
    case Kind::And:
    case Kind::Or: {
      std::vector<Formula> kids;
      kids.reserve(f.kids().size());
      for (const auto& k : f.kids()) kids.push_back(normalize_nnf(k, negated));
      bool conj = (f.kind() == Kind::And) != negated;
      return conj ? simplify_and(std::move(kids)) : simplify_or(std::move(kids));
    }
    case Kind::Exists:
    case Kind::Forall: {
      Formula body = normalize_nnf(f.body(), negated);
      if (!free_vars(body).count(f.var())) return body;
      bool ex = (f.kind() == Kind::Exists) != negated;
      return ex ? Formula::exists(f.var(), body) : Formula::forall(f.var(), body);
    }
  }
  return f;
}

}  // namespace detail

/// Negation normal form with canonical atoms, folded constants, sorted and
/// deduplicated connectives. Idempotent.
inline Formula normalize(const Formula& f) { return detail::normalize_nnf(f, false); }

/// Conjunction of already-normalized formulas, simplified.
inline Formula and_normalized(std::vector<Formula> kids) { return detail::simplify_and(std::move(kids)); }
inline Formula or_normalized(std::vector<Formula> kids) { return detail::simplify_or(std::move(kids)); }

}  // namespace presburger
