// Ground truth: evaluation over Z and over M_s, brute-force enumeration,
// and the Z-group axiom sampler.
#pragma once

#include "presburger/formula.hpp"
#include "presburger/nonstd_int.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace presburger {

template <class V>
using Assignment = std::map<std::string, V>;

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class V>
struct ModelTraits;

template <>
struct ModelTraits<Int> {
  static Int make(const Int& c, std::size_t) { return c; }
  static int sign(const Int& v) { return sgn(v); }
  static bool divisible(const Int& v, const Int& n) { return divides(n, v); }
};

template <>
struct ModelTraits<NonstdInt> {
  static NonstdInt make(const Int& c, std::size_t levels) { return NonstdInt(levels, c); }
  static int sign(const NonstdInt& v) { return v.sign(); }
  static bool divisible(const NonstdInt& v, const Int& n) { return v.divisible_by(n); }
};

template <class V>
std::size_t model_levels(const Assignment<V>&) {
  return 0;
}
template <>
inline std::size_t model_levels<NonstdInt>(const Assignment<NonstdInt>& rho) {
  return rho.empty() ? 0 : rho.begin()->second.levels();
}

}  // namespace detail

/// Value of a term under an assignment.
template <class V>
V term_value(const LinearTerm& t, const Assignment<V>& rho, std::size_t levels) {
  V acc = detail::ModelTraits<V>::make(t.constant(), levels);
  for (const auto& [v, c] : t.coeffs()) {
    auto it = rho.find(v);
    if (it == rho.end()) throw EvalError("variable '" + v + "' is not assigned");
    acc = acc + c * it->second;
  }
  return acc;
}

template <class V>
bool eval_atom(const Atom& a, const Assignment<V>& rho, std::size_t levels) {
  using T = detail::ModelTraits<V>;
  V val = term_value(a.term, rho, levels);
  switch (a.kind) {
    case AtomKind::Eq:
      return T::sign(val) == 0;
    case AtomKind::Gt:
      return T::sign(val) > 0;
    case AtomKind::Div:
      return T::divisible(val, a.modulus);
  }
  return false;
}

/// Truth of a quantifier-free formula in Z (V = Int) or M_s (V = NonstdInt).
template <class V>
bool eval(const Formula& f, const Assignment<V>& rho) {
  std::size_t levels = detail::model_levels(rho);
  auto go = [&](auto& self, const Formula& g) -> bool {
    switch (g.kind()) {
      case Kind::True:
        return true;
      case Kind::False:
        return false;
      case Kind::Atom:
        return eval_atom(g.atom(), rho, levels);
      case Kind::Not:
        return !self(self, g.body());
      case Kind::And:
        for (const auto& k : g.kids())
          if (!self(self, k)) return false;
        return true;
      case Kind::Or:
        for (const auto& k : g.kids())
          if (self(self, k)) return true;
        return false;
      default:
        throw EvalError("eval requires a quantifier-free formula");
    }
  };
  return go(go, f);
}

// ---------------------------------------------------------------------------
// Fast evaluation on machine integers for enumeration over boxes.

/// A quantifier-free formula compiled against a fixed variable order. Uses
/// 64-bit coefficients with 128-bit accumulation when every coefficient fits,
/// and falls back to exact evaluation otherwise.
class CompiledFormula {
 public:
  CompiledFormula(const Formula& f, const std::vector<std::string>& vars) : formula_(f), vars_(vars) {
    if (!is_quantifier_free(f)) throw EvalError("cannot compile a quantified formula");
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < vars.size(); ++i) index[vars[i]] = i;
    fast_ = true;
    root_ = compile(f, index);
  }

  const std::vector<std::string>& vars() const { return vars_; }

  bool operator()(const std::vector<std::int64_t>& point) const {
    if (fast_) return run(root_, point);
    Assignment<Int> rho;
    for (std::size_t i = 0; i < vars_.size(); ++i) rho[vars_[i]] = Int(static_cast<long>(point[i]));
    return eval(formula_, rho);
  }

 private:
  struct Node {
    Kind kind = Kind::True;
    AtomKind atom_kind = AtomKind::Gt;
    std::int64_t modulus = 1;
    std::int64_t constant = 0;
    std::vector<std::pair<std::size_t, std::int64_t>> coeffs;
    std::vector<std::size_t> kids;
  };

  std::size_t compile(const Formula& f, const std::map<std::string, std::size_t>& index) {
    Node n;
    n.kind = f.kind();
    if (f.is_atom()) {
      const Atom& a = f.atom();
      n.atom_kind = a.kind;
      if (!fits_int64(a.modulus) || !fits_int64(a.term.constant())) fast_ = false;
      n.modulus = fast_ ? a.modulus.get_si() : 1;
      n.constant = fast_ ? a.term.constant().get_si() : 0;
      for (const auto& [v, c] : a.term.coeffs()) {
        auto it = index.find(v);
        if (it == index.end()) throw EvalError("variable '" + v + "' is not in the evaluation order");
        if (!fits_int64(c) || abs(c) > (Int(1) << 62)) fast_ = false;
        n.coeffs.emplace_back(it->second, fast_ ? c.get_si() : 0);
      }
    }
    for (const auto& k : f.kids()) n.kids.push_back(compile(k, index));
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }

  bool run(std::size_t id, const std::vector<std::int64_t>& p) const {
    const Node& n = nodes_[id];
    switch (n.kind) {
      case Kind::True:
        return true;
      case Kind::False:
        return false;
      case Kind::Atom: {
        __int128 acc = n.constant;
        for (const auto& [i, c] : n.coeffs) acc += static_cast<__int128>(c) * p[i];
        switch (n.atom_kind) {
          case AtomKind::Eq:
            return acc == 0;
          case AtomKind::Gt:
            return acc > 0;
          case AtomKind::Div:
            return acc % n.modulus == 0;
        }
        return false;
      }
      case Kind::Not:
        return !run(n.kids[0], p);
      case Kind::And:
        for (auto k : n.kids)
          if (!run(k, p)) return false;
        return true;
      case Kind::Or:
        for (auto k : n.kids)
          if (run(k, p)) return true;
        return false;
      default:
        return false;
    }
  }

  Formula formula_;
  std::vector<std::string> vars_;
  std::vector<Node> nodes_;
  std::size_t root_ = 0;
  bool fast_ = true;
};

struct BoxRange {
  std::string var;
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};
using Box = std::vector<BoxRange>;

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

class BoxTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline std::uint64_t box_volume(const Box& box) {
  std::uint64_t v = 1;
  for (const auto& r : box) {
    if (r.hi < r.lo) return 0;
    auto w = static_cast<std::uint64_t>(r.hi - r.lo) + 1;
    if (w != 0 && v > UINT64_MAX / w) return UINT64_MAX;
    v *= w;
  }
  return v;
}

/// Calls `fn(point)` for every point of the box in lexicographic order.
template <class Fn>
void for_each_point(const Box& box, Fn&& fn) {
  if (box_volume(box) == 0) return;
  std::vector<std::int64_t> p(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) p[i] = box[i].lo;
  while (true) {
    fn(static_cast<const std::vector<std::int64_t>&>(p));
    std::size_t i = box.size();
    while (i > 0) {
      --i;
      if (p[i] < box[i].hi) {
        ++p[i];
        for (std::size_t j = i + 1; j < box.size(); ++j) p[j] = box[j].lo;
        break;
      }
      if (i == 0) return;
    }
    if (box.empty()) return;
  }
}

/// All points of the box satisfying the quantifier-free formula, in
/// lexicographic order of the box's variable order.
inline std::vector<std::vector<std::int64_t>> enumerate(const Formula& f, const Box& box,
                                                        std::uint64_t cap = kDefaultEnumerationCap) {
  std::uint64_t vol = box_volume(box);
  if (vol > cap) throw BoxTooLarge("box volume " + std::to_string(vol) + " exceeds cap " + std::to_string(cap));
  std::vector<std::string> vars;
  for (const auto& r : box) vars.push_back(r.var);
  for (const auto& v : free_vars(f)) {
    if (std::find(vars.begin(), vars.end(), v) == vars.end())
      throw EvalError("variable '" + v + "' is not covered by the box");
  }
  CompiledFormula cf(f, vars);
  std::vector<std::vector<std::int64_t>> out;
  for_each_point(box, [&](const std::vector<std::int64_t>& p) {
    if (cf(p)) out.push_back(p);
  });
  return out;
}

inline Box cube(const std::vector<std::string>& vars, std::int64_t lo, std::int64_t hi) {
  Box b;
  for (const auto& v : vars) b.push_back({v, lo, hi});
  return b;
}

// ---------------------------------------------------------------------------
// Z-group axioms of M_s

struct AxiomReport {
  bool pass = true;
  std::uint64_t checks = 0;
  std::string counterexample;
};

namespace detail {

struct NonstdSampler {
  std::mt19937_64 rng;
  std::size_t levels;

  Rat rational() {
    std::uniform_int_distribution<long> num(-1000, 1000), den(1, 1000);
    Rat q(num(rng), den(rng));
    q.canonicalize();
    return q;
  }
  NonstdInt element() {
    std::uniform_int_distribution<long> fin(-1'000'000, 1'000'000);
    std::uniform_int_distribution<int> zero(0, 3);
    std::vector<Rat> inf(levels);
    for (auto& q : inf) q = zero(rng) == 0 ? Rat(0) : rational();
    return NonstdInt(std::move(inf), Int(fin(rng)));
  }
  // Elements close to a given one: standard offsets and random ones.
  NonstdInt near(const NonstdInt& x) {
    std::uniform_int_distribution<int> pick(0, 2);
    std::uniform_int_distribution<long> small(-2, 2);
    switch (pick(rng)) {
      case 0:
        return x + Int(small(rng));
      case 1: {
        NonstdInt d = element();
        return x + d;
      }
      default:
        return element();
    }
  }
};

}  // namespace detail

/// Samples elements of M_s and checks: order/addition compatibility,
/// discreteness (nothing strictly between x and x+1), and existence and
/// uniqueness of division with remainder for n = 2..12.
inline AxiomReport check_zgroup_axioms(std::size_t levels, std::uint64_t trials, std::uint64_t seed) {
  detail::NonstdSampler gen{std::mt19937_64(seed), levels};
  AxiomReport rep;
  auto fail = [&](const std::string& what) {
    if (rep.pass) {
      rep.pass = false;
      rep.counterexample = what;
    }
  };
  for (std::uint64_t t = 0; t < trials && rep.pass; ++t) {
    NonstdInt x = gen.element();
    NonstdInt y = gen.near(x);
    NonstdInt z = gen.element();
    // total order
    ++rep.checks;
    int trich = (x < y) + (x == y) + (x > y);
    if (trich != 1) fail("trichotomy fails for " + x.to_string() + ", " + y.to_string());
    // translation invariance
    ++rep.checks;
    if ((x < y) != (x + z < y + z)) fail("order not translation invariant: " + x.to_string() + " " + y.to_string());
    // discreteness
    ++rep.checks;
    NonstdInt x1 = x + Int(1);
    if (x < y && y < x1) fail("element " + y.to_string() + " strictly between " + x.to_string() + " and x+1");
    ++rep.checks;
    if (x < y && !(x1 <= y)) fail("successor of " + x.to_string() + " not below " + y.to_string());
    // zero and negation
    ++rep.checks;
    if (!(x + (-x)).is_zero() || (x.sign() > 0) != ((-x).sign() < 0)) fail("negation fails for " + x.to_string());
    // division with remainder
    for (long n = 2; n <= 12; ++n) {
      ++rep.checks;
      auto [q, r] = x.divmod(Int(n));
      if (r < 0 || r >= n || Int(n) * q + NonstdInt(levels, r) != x) {
        fail("division by " + std::to_string(n) + " fails for " + x.to_string());
        break;
      }
      for (long r2 = 0; r2 < n; ++r2) {
        if (Int(r2) == r) continue;
        // x - r2 = n*q2 would force the finite part of x - r2 to be a
        // multiple of n, since every rational infinite part is divisible.
        if (divides(Int(n), x.finite() - r2)) fail("remainder not unique for " + x.to_string());
      }
      NonstdInt other = q + Int(1);
      if (Int(n) * other + NonstdInt(levels, r) == x) fail("quotient not unique for " + x.to_string());
    }
  }
  return rep;
}

}  // namespace presburger
