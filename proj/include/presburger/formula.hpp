// Presburger formula syntax: atoms, connectives and quantifiers.
#pragma once

#include "presburger/linear_term.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace presburger {

enum class AtomKind { Eq, Gt, Div };

/// `t = 0`, `t > 0`, or `N | t`.
struct Atom {
  AtomKind kind = AtomKind::Gt;
  Int modulus = 1;  // only meaningful for Div
  LinearTerm term;

  static Atom eq(LinearTerm t) { return {AtomKind::Eq, 1, std::move(t)}; }
  static Atom gt(LinearTerm t) { return {AtomKind::Gt, 1, std::move(t)}; }
  static Atom div(Int n, LinearTerm t) {
    if (n < 1) throw std::invalid_argument("divisibility modulus must be >= 1");
    return {AtomKind::Div, std::move(n), std::move(t)};
  }

  bool has(const std::string& v) const { return term.has(v); }

  friend int compare(const Atom& a, const Atom& b) {
    if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
    if (a.modulus != b.modulus) return a.modulus < b.modulus ? -1 : 1;
    return compare(a.term, b.term);
  }
  friend bool operator==(const Atom& a, const Atom& b) { return compare(a, b) == 0; }
};

enum class Kind { True, False, Atom, Not, And, Or, Exists, Forall };

/// Immutable formula tree with shared subterms.
class Formula {
 public:
  struct Node {
    Kind kind;
    presburger::Atom atom;
    std::vector<Formula> kids;
    std::string var;
  };

  Formula() : Formula(truth()) {}

  static Formula truth() {
    static const Formula t(std::make_shared<const Node>(Node{Kind::True, {}, {}, {}}));
    return t;
  }
  static Formula falsity() {
    static const Formula f(std::make_shared<const Node>(Node{Kind::False, {}, {}, {}}));
    return f;
  }
  static Formula constant(bool b) { return b ? truth() : falsity(); }
  static Formula atom(presburger::Atom a) {
    return Formula(std::make_shared<const Node>(Node{Kind::Atom, std::move(a), {}, {}}));
  }
  static Formula eq(LinearTerm t) { return atom(Atom::eq(std::move(t))); }
  static Formula gt(LinearTerm t) { return atom(Atom::gt(std::move(t))); }
  static Formula divides(Int n, LinearTerm t) { return atom(Atom::div(std::move(n), std::move(t))); }

  static Formula neg(Formula f) {
    return Formula(std::make_shared<const Node>(Node{Kind::Not, {}, {std::move(f)}, {}}));
  }
  /// n-ary conjunction; nested conjunctions are flattened, but constants are
  /// kept (folding is `normalize`'s job).
  static Formula conj(std::vector<Formula> fs) { return nary(Kind::And, std::move(fs)); }
  static Formula disj(std::vector<Formula> fs) { return nary(Kind::Or, std::move(fs)); }
  static Formula exists(std::string v, Formula body) {
    return Formula(std::make_shared<const Node>(Node{Kind::Exists, {}, {std::move(body)}, std::move(v)}));
  }
  static Formula forall(std::string v, Formula body) {
    return Formula(std::make_shared<const Node>(Node{Kind::Forall, {}, {std::move(body)}, std::move(v)}));
  }
  static Formula implies(Formula a, Formula b) { return disj({neg(std::move(a)), std::move(b)}); }

  Kind kind() const { return node_->kind; }
  const presburger::Atom& atom() const { return node_->atom; }
  const std::vector<Formula>& kids() const { return node_->kids; }
  const Formula& body() const { return node_->kids.front(); }
  const std::string& var() const { return node_->var; }

  bool is_true() const { return kind() == Kind::True; }
  bool is_false() const { return kind() == Kind::False; }
  bool is_atom() const { return kind() == Kind::Atom; }
  bool is_quantifier() const { return kind() == Kind::Exists || kind() == Kind::Forall; }
  /// Atom or negated atom.
  bool is_literal() const { return is_atom() || (kind() == Kind::Not && body().is_atom()); }

  friend int compare(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return 0;
    if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
    switch (a.kind()) {
      case Kind::True:
      case Kind::False:
        return 0;
      case Kind::Atom:
        return compare(a.atom(), b.atom());
      case Kind::Exists:
      case Kind::Forall:
        if (a.var() != b.var()) return a.var() < b.var() ? -1 : 1;
        [[fallthrough]];
      default: {
        const auto& ka = a.kids();
        const auto& kb = b.kids();
        for (std::size_t i = 0; i < ka.size() && i < kb.size(); ++i) {
          int c = compare(ka[i], kb[i]);
          if (c != 0) return c;
        }
        if (ka.size() != kb.size()) return ka.size() < kb.size() ? -1 : 1;
        return 0;
      }
    }
  }
  friend bool operator==(const Formula& a, const Formula& b) { return compare(a, b) == 0; }
  friend bool operator<(const Formula& a, const Formula& b) { return compare(a, b) < 0; }

 private:
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static Formula nary(Kind k, std::vector<Formula> fs) {
    std::vector<Formula> flat;
    flat.reserve(fs.size());
    for (auto& f : fs) {
      if (f.kind() == k) {
        flat.insert(flat.end(), f.kids().begin(), f.kids().end());
      } else {
        flat.push_back(std::move(f));
      }
    }
    if (flat.empty()) return k == Kind::And ? truth() : falsity();
    if (flat.size() == 1) return flat.front();
    return Formula(std::make_shared<const Node>(Node{k, {}, std::move(flat), {}}));
  }

  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Structural utilities

inline void collect_free_vars(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (f.kind()) {
    case Kind::True:
    case Kind::False:
      return;
    case Kind::Atom:
      for (const auto& [v, c] : f.atom().term.coeffs())
        if (!bound.count(v)) out.insert(v);
      return;
    case Kind::Exists:
    case Kind::Forall: {
      bool fresh = bound.insert(f.var()).second;
      collect_free_vars(f.body(), bound, out);
      if (fresh) bound.erase(f.var());
      return;
    }
    default:
      for (const auto& k : f.kids()) collect_free_vars(k, bound, out);
  }
}

inline std::set<std::string> free_vars(const Formula& f) {
  std::set<std::string> bound, out;
  collect_free_vars(f, bound, out);
  return out;
}

inline void collect_all_vars(const Formula& f, std::set<std::string>& out) {
  if (f.is_atom()) {
    for (const auto& [v, c] : f.atom().term.coeffs()) out.insert(v);
    return;
  }
  if (f.is_quantifier()) out.insert(f.var());
  for (const auto& k : f.kids()) collect_all_vars(k, out);
}

inline std::set<std::string> all_vars(const Formula& f) {
  std::set<std::string> out;
  collect_all_vars(f, out);
  return out;
}

inline bool is_quantifier_free(const Formula& f) {
  if (f.is_quantifier()) return false;
  return std::all_of(f.kids().begin(), f.kids().end(), [](const Formula& k) { return is_quantifier_free(k); });
}

inline bool mentions(const Formula& f, const std::string& v) {
  if (f.is_atom()) return f.atom().has(v);
  return std::any_of(f.kids().begin(), f.kids().end(), [&](const Formula& k) { return mentions(k, v); });
}

/// `base`, or `base_1`, `base_2`, ... avoiding every name in `avoid`.
inline std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  for (unsigned i = 1;; ++i) {
    std::string cand = base + "_" + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

/// Rebuild a node with new children, keeping kind/atom/var.
inline Formula rebuild(const Formula& f, std::vector<Formula> kids) {
  switch (f.kind()) {
    case Kind::Not:
      return Formula::neg(std::move(kids.front()));
    case Kind::And:
      return Formula::conj(std::move(kids));
    case Kind::Or:
      return Formula::disj(std::move(kids));
    case Kind::Exists:
      return Formula::exists(f.var(), std::move(kids.front()));
    case Kind::Forall:
      return Formula::forall(f.var(), std::move(kids.front()));
    default:
      return f;
  }
}

/// Apply `fn` to every atom; `fn` returns the replacement formula.
inline Formula map_atoms(const Formula& f, const std::function<Formula(const Atom&)>& fn) {
  if (f.is_atom()) return fn(f.atom());
  if (f.kids().empty()) return f;
  std::vector<Formula> kids;
  kids.reserve(f.kids().size());
  for (const auto& k : f.kids()) kids.push_back(map_atoms(k, fn));
  return rebuild(f, std::move(kids));
}

namespace detail {

inline Formula substitute_impl(const Formula& f, const std::string& x, const LinearTerm& t,
                               const std::set<std::string>& tvars) {
  switch (f.kind()) {
    case Kind::True:
    case Kind::False:
      return f;
    case Kind::Atom: {
      if (!f.atom().has(x)) return f;
      Atom a = f.atom();
      a.term = a.term.substitute(x, t);
      return Formula::atom(std::move(a));
    }
    case Kind::Exists:
    case Kind::Forall: {
      if (f.var() == x) return f;
      if (!free_vars(f.body()).count(x)) return f;
      Formula body = f.body();
      std::string v = f.var();
      if (tvars.count(v)) {
        std::set<std::string> avoid = all_vars(body);
        avoid.insert(tvars.begin(), tvars.end());
        avoid.insert(x);
        std::string nv = fresh_name(v, avoid);
        body = substitute_impl(body, v, LinearTerm::var(nv), {nv});
        v = nv;
      }
      body = substitute_impl(body, x, t, tvars);
      return f.kind() == Kind::Exists ? Formula::exists(v, body) : Formula::forall(v, body);
    }
    default: {
      std::vector<Formula> kids;
      kids.reserve(f.kids().size());
      for (const auto& k : f.kids()) kids.push_back(substitute_impl(k, x, t, tvars));
      return rebuild(f, std::move(kids));
    }
  }
}

}  // namespace detail

/// Capture-avoiding substitution of `t` for the free occurrences of `x`.
/// Bound variables that would capture a variable of `t` are renamed.
inline Formula substitute(const Formula& f, const std::string& x, const LinearTerm& t) {
  return detail::substitute_impl(f, x, t, t.vars());
}

/// Rename free variables simultaneously (capture-avoiding through fresh
/// intermediate names).
inline Formula rename_free(const Formula& f, const std::map<std::string, std::string>& names) {
  std::set<std::string> avoid = all_vars(f);
  for (const auto& [a, b] : names) avoid.insert(b);
  std::map<std::string, std::string> tmp;
  Formula g = f;
  for (const auto& [a, b] : names) {
    if (a == b) continue;
    std::string t = fresh_name("tmp_" + a, avoid);
    avoid.insert(t);
    tmp[t] = b;
    g = substitute(g, a, LinearTerm::var(t));
  }
  for (const auto& [t, b] : tmp) g = substitute(g, t, LinearTerm::var(b));
  return g;
}

/// Negation pushed to the literals without any other simplification:
/// not(t = 0) becomes t > 0 or -t > 0, not(t > 0) becomes -t + 1 > 0, and
/// negated divisibility stays a negative literal.
inline Formula negate(const Formula& f) {
  switch (f.kind()) {
    case Kind::True:
      return Formula::falsity();
    case Kind::False:
      return Formula::truth();
    case Kind::Atom: {
      const Atom& a = f.atom();
      switch (a.kind) {
        case AtomKind::Gt:
          return Formula::gt(-a.term + LinearTerm(1));
        case AtomKind::Eq:
          return Formula::disj({Formula::gt(a.term), Formula::gt(-a.term)});
        case AtomKind::Div:
          return Formula::neg(f);
      }
      return f;
    }
    case Kind::Not:
      return f.body().is_atom() ? f.body() : negate(negate(f.body()));
    case Kind::And:
    case Kind::Or: {
      std::vector<Formula> kids;
      for (const auto& k : f.kids()) kids.push_back(negate(k));
      return f.kind() == Kind::And ? Formula::disj(std::move(kids)) : Formula::conj(std::move(kids));
    }
    case Kind::Exists:
      return Formula::forall(f.var(), negate(f.body()));
    case Kind::Forall:
      return Formula::exists(f.var(), negate(f.body()));
  }
  return f;
}

/// Negation normal form (negations only in front of divisibility atoms).
inline Formula to_nnf(const Formula& f) {
  switch (f.kind()) {
    case Kind::Not:
      return f.body().is_atom() && f.body().atom().kind == AtomKind::Div ? f : negate(to_nnf(f.body()));
    case Kind::True:
    case Kind::False:
    case Kind::Atom:
      return f;
    default: {
      std::vector<Formula> kids;
      for (const auto& k : f.kids()) kids.push_back(to_nnf(k));
      return rebuild(f, std::move(kids));
    }
  }
}

/// Bound variables renamed to `_b0`, `_b1`, ... in order of appearance;
/// two formulas are alpha-equivalent iff their canonical forms are equal.
inline Formula alpha_canonical(const Formula& f) {
  std::set<std::string> avoid = all_vars(f);
  unsigned counter = 0;
  std::function<Formula(const Formula&)> go = [&](const Formula& g) -> Formula {
    if (g.is_quantifier()) {
      std::string nv;
      do {
        nv = "_b" + std::to_string(counter++);
      } while (avoid.count(nv));
      Formula body = substitute(g.body(), g.var(), LinearTerm::var(nv));
      body = go(body);
      return g.kind() == Kind::Exists ? Formula::exists(nv, body) : Formula::forall(nv, body);
    }
    if (g.kids().empty()) return g;
    std::vector<Formula> kids;
    for (const auto& k : g.kids()) kids.push_back(go(k));
    return rebuild(g, std::move(kids));
  };
  return go(f);
}

inline bool alpha_equivalent(const Formula& a, const Formula& b) { return alpha_canonical(a) == alpha_canonical(b); }

/// Number of nodes, used for size limits in tests and the CLI.
inline std::size_t formula_size(const Formula& f) {
  std::size_t n = 1;
  for (const auto& k : f.kids()) n += formula_size(k);
  return n;
}

}  // namespace presburger
