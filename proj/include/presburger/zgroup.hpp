// Groups definable in the model M_s: the convex subgroups O(a) and o(a),
// standard parts, local lattices, the quotient C(a,b) = O(a)/Lambda and the
// extensions Z^r x O(a) / sum Z(v_i, b_i) with their 2-cocycles.
//
// An element of O(a) is an s-tuple of model elements; coordinate j is
// measured against a_j. The model has as many infinite levels as the scale
// has entries, level 0 being the most significant.
#pragma once

#include "presburger/nonstd_int.hpp"
#include "presburger/syntax.hpp"
#include "presburger/ubd.hpp"

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace presburger {

using ModelTuple = std::vector<NonstdInt>;
using RatMatrix = std::vector<std::vector<Rat>>;

// ---------------------------------------------------------------------------
// Scale, O(a), o(a), standard part

struct Scale {
  ModelTuple a;

  std::size_t size() const { return a.size(); }
  std::size_t levels() const { return a.empty() ? 0 : a[0].levels(); }

  /// a_i = unit of level s - i, so 1 << a_1 << ... << a_s.
  static Scale standard(std::size_t s) {
    Scale sc;
    for (std::size_t i = 0; i < s; ++i) sc.a.push_back(NonstdInt::unit(s, s - 1 - i));
    return sc;
  }

  /// Throws unless every a_j is positive and infinite.
  void validate() const {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (a[j].levels() != levels()) throw std::invalid_argument("scale entries live in different models");
      if (a[j].sign() <= 0 || a[j].is_standard())
        throw std::invalid_argument("scale entry " + a[j].to_string() + " is not positive and infinite");
    }
  }
};

namespace detail {

inline void check_arity(const ModelTuple& x, const Scale& scale) {
  if (x.size() != scale.size()) throw std::invalid_argument("tuple arity does not match the scale");
}

}  // namespace detail

/// |x| < n*a for some standard n: x lives no higher than a's leading level.
inline bool in_O(const NonstdInt& x, const NonstdInt& a) { return x.leading_level() >= a.leading_level(); }

/// n*|x| < a for every standard n.
inline bool in_o(const NonstdInt& x, const NonstdInt& a) { return x.leading_level() > a.leading_level(); }

inline bool in_O(const ModelTuple& x, const Scale& scale) {
  detail::check_arity(x, scale);
  for (std::size_t j = 0; j < x.size(); ++j)
    if (!in_O(x[j], scale.a[j])) return false;
  return true;
}

inline bool in_o(const ModelTuple& x, const Scale& scale) {
  detail::check_arity(x, scale);
  for (std::size_t j = 0; j < x.size(); ++j)
    if (!in_o(x[j], scale.a[j])) return false;
  return true;
}

/// Image of x in O(a)/o(a) = Q^s: the ratio of x_j to a_j at a_j's level.
inline std::vector<Rat> std_part(const ModelTuple& x, const Scale& scale) {
  if (!in_O(x, scale)) throw std::invalid_argument("std_part: element is not in O(a)");
  std::vector<Rat> out;
  for (std::size_t j = 0; j < x.size(); ++j) {
    std::size_t l = scale.a[j].leading_level();
    out.push_back(x[j].infinite()[l] / scale.a[j].infinite()[l]);
  }
  return out;
}

/// The element sum_j q_j a_j.
inline ModelTuple lift(const std::vector<Rat>& q, const Scale& scale) {
  ModelTuple out;
  for (std::size_t j = 0; j < q.size(); ++j) {
    std::vector<Rat> inf = scale.a[j].infinite();
    for (auto& c : inf) c *= q[j];
    Rat fin = q[j] * Rat(scale.a[j].finite());
    if (!is_integer(fin)) throw std::invalid_argument("lift: q * a has a fractional finite part");
    out.emplace_back(std::move(inf), fin.get_num());
  }
  return out;
}

inline ModelTuple operator+(const ModelTuple& x, const ModelTuple& y) {
  if (x.size() != y.size()) throw std::invalid_argument("tuple arity mismatch");
  ModelTuple out = x;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += y[i];
  return out;
}

inline ModelTuple operator-(const ModelTuple& x) {
  ModelTuple out;
  for (const auto& c : x) out.push_back(-c);
  return out;
}

inline ModelTuple operator-(const ModelTuple& x, const ModelTuple& y) { return x + (-y); }

inline ModelTuple operator*(const Int& k, const ModelTuple& x) {
  ModelTuple out;
  for (const auto& c : x) out.push_back(k * c);
  return out;
}

inline ModelTuple zero_tuple(std::size_t n, std::size_t levels) { return ModelTuple(n, NonstdInt(levels)); }

inline bool is_zero(const ModelTuple& x) {
  for (const auto& c : x)
    if (!c.is_zero()) return false;
  return true;
}

inline std::string tuple_string(const ModelTuple& x) {
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i) out += (i ? ", " : "") + x[i].literal();
  return out;
}

// ---------------------------------------------------------------------------
// Local lattices

namespace detail {

/// Inverse of a square rational matrix, or nullopt when singular.
inline std::optional<RatMatrix> inverse(RatMatrix m) {
  std::size_t n = m.size();
  RatMatrix inv(n, std::vector<Rat>(n, Rat(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(m[p], m[c]);
    std::swap(inv[p], inv[c]);
    Rat d = m[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      m[c][k] /= d;
      inv[c][k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || m[r][c] == 0) continue;
      Rat f = m[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        m[r][k] -= f * m[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

}  // namespace detail

class LocalLattice {
 public:
  /// Generators b_1..b_s, each an s-tuple in O(a) whose standard parts form
  /// a basis of Q^s.
  LocalLattice(Scale scale, std::vector<ModelTuple> generators) : scale_(std::move(scale)), b_(std::move(generators)) {
    scale_.validate();
    std::size_t s = scale_.size();
    if (b_.size() != s) throw std::invalid_argument("a local lattice needs exactly s generators");
    basis_.assign(s, std::vector<Rat>(s));
    for (std::size_t i = 0; i < s; ++i) {
      if (!in_O(b_[i], scale_)) throw std::invalid_argument("lattice generator is not in O(a)");
      auto pi = std_part(b_[i], scale_);
      for (std::size_t j = 0; j < s; ++j) basis_[j][i] = pi[j];
    }
    auto inv = detail::inverse(basis_);
    if (!inv) throw std::invalid_argument("standard parts of the generators are linearly dependent");
    coords_ = std::move(*inv);
  }

  const Scale& scale() const { return scale_; }
  const std::vector<ModelTuple>& generators() const { return b_; }
  /// Columns are the standard parts of the generators.
  const RatMatrix& basis() const { return basis_; }

  /// Coordinates of a standard part in the basis of generators.
  std::vector<Rat> coordinates(const std::vector<Rat>& q) const {
    std::vector<Rat> t(q.size(), Rat(0));
    for (std::size_t i = 0; i < q.size(); ++i)
      for (std::size_t j = 0; j < q.size(); ++j) t[i] += coords_[i][j] * q[j];
    return t;
  }

  /// Lattice coordinates of x all lie in [0, 1).
  bool is_reduced(const ModelTuple& x) const {
    for (const auto& t : coordinates(std_part(x, scale_)))
      if (t < 0 || t >= 1) return false;
    return true;
  }

 private:
  Scale scale_;
  std::vector<ModelTuple> b_;
  RatMatrix basis_;
  RatMatrix coords_;
};

struct Reduction {
  ModelTuple rep;
  std::vector<Int> coeffs;
};

/// x = rep + sum coeffs_i b_i with rep in the half-open fundamental
/// parallelepiped.
inline Reduction reduce(const ModelTuple& x, const LocalLattice& lattice) {
  auto t = lattice.coordinates(std_part(x, lattice.scale()));
  Reduction out{x, {}};
  for (std::size_t i = 0; i < t.size(); ++i) {
    Int c = floor(t[i]);
    out.coeffs.push_back(c);
    out.rep = out.rep - c * lattice.generators()[i];
  }
  return out;
}

/// Sum in C(a,b) = O(a)/Lambda on reduced representatives.
inline ModelTuple quotient_add(const ModelTuple& x, const ModelTuple& y, const LocalLattice& lattice) {
  return reduce(x + y, lattice).rep;
}

// ---------------------------------------------------------------------------
// Extensions Z^r x O(a) / sum_i Z(v_i, b_i)

struct ExtGroupSpec {
  std::size_t r = 0;
  LocalLattice lattice;
  std::vector<ModelTuple> twists;  // v_1..v_s, each an r-tuple

  ExtGroupSpec(std::size_t rank, LocalLattice lat, std::vector<ModelTuple> v)
      : r(rank), lattice(std::move(lat)), twists(std::move(v)) {
    if (twists.size() != s()) throw std::invalid_argument("need one twist per lattice generator");
    for (const auto& vi : twists) {
      if (vi.size() != r) throw std::invalid_argument("twist arity does not match r");
      for (const auto& c : vi)
        if (c.levels() != levels()) throw std::invalid_argument("twist lives in a different model");
    }
  }

  std::size_t s() const { return lattice.scale().size(); }
  std::size_t levels() const { return lattice.scale().levels(); }

  /// sum_i lambda_i v_i
  ModelTuple twist(const std::vector<Int>& lambda) const {
    ModelTuple out = zero_tuple(r, levels());
    for (std::size_t i = 0; i < lambda.size(); ++i) out = out + lambda[i] * twists[i];
    return out;
  }
};

struct ExtElement {
  ModelTuple u;
  ModelTuple x;

  friend bool operator==(const ExtElement&, const ExtElement&) = default;

  /// `(u | x)`
  std::string to_string() const { return "(" + tuple_string(u) + " | " + tuple_string(x) + ")"; }
};

namespace detail {

inline void check_element(const ExtElement& g, const ExtGroupSpec& spec) {
  if (g.u.size() != spec.r || g.x.size() != spec.s()) throw std::invalid_argument("element does not belong to this group");
  if (!spec.lattice.is_reduced(g.x)) throw std::invalid_argument("element " + g.to_string() + " is not reduced");
}

}  // namespace detail

/// Class of (u, x) for any x in O(a): (v_i, b_i) is zero, so a carry of
/// lambda in x costs sum lambda_i v_i in u.
inline ExtElement ext_make(const ModelTuple& u, const ModelTuple& x, const ExtGroupSpec& spec) {
  Reduction red = reduce(x, spec.lattice);
  return {u - spec.twist(red.coeffs), red.rep};
}

inline ExtElement ext_zero(const ExtGroupSpec& spec) {
  return {zero_tuple(spec.r, spec.levels()), zero_tuple(spec.s(), spec.levels())};
}

inline ExtElement ext_add(const ExtElement& g, const ExtElement& h, const ExtGroupSpec& spec) {
  detail::check_element(g, spec);
  detail::check_element(h, spec);
  return ext_make(g.u + h.u, g.x + h.x, spec);
}

inline ExtElement ext_neg(const ExtElement& g, const ExtGroupSpec& spec) {
  detail::check_element(g, spec);
  return ext_make(-g.u, -g.x, spec);
}

/// j: Z^r -> G, u -> (u, 0).
inline ExtElement ext_include(const ModelTuple& u, const ExtGroupSpec& spec) { return {u, zero_tuple(spec.s(), spec.levels())}; }

/// q: G -> C(a,b), (u, x) -> x.
inline ModelTuple ext_project(const ExtElement& g) { return g.x; }

/// g(x, y) with i(g(x,y)) = s(x+y) - s(x) - s(y) for the section
/// s(x) = (0, x): the carry of x + y, twisted.
inline ModelTuple cocycle(const ModelTuple& x, const ModelTuple& y, const ExtGroupSpec& spec) {
  if (!spec.lattice.is_reduced(x) || !spec.lattice.is_reduced(y)) throw std::invalid_argument("cocycle: unreduced input");
  return spec.twist(reduce(x + y, spec.lattice).coeffs);
}

/// The cocycle of an arbitrary section, computed with the group law.
template <class Section>
ModelTuple section_cocycle(const ModelTuple& x, const ModelTuple& y, Section section, const ExtGroupSpec& spec) {
  ExtElement sum = section(quotient_add(x, y, spec.lattice));
  ExtElement parts = ext_add(section(x), section(y), spec);
  ExtElement diff = ext_add(sum, ext_neg(parts, spec), spec);
  if (!is_zero(diff.x)) throw std::logic_error("section does not lift the quotient");
  return diff.u;
}

// ---------------------------------------------------------------------------
// Sampling and verification

class ExtSampler {
 public:
  ExtSampler(const ExtGroupSpec& spec, std::uint64_t seed) : spec_(spec), rng_(seed) {}

  Rat rational(long bound = 1000) {
    std::uniform_int_distribution<long> num(-bound, bound), den(1, bound);
    Rat q(num(rng_), den(rng_));
    q.canonicalize();
    return q;
  }

  NonstdInt model_element() {
    std::uniform_int_distribution<long> fin(-1'000'000, 1'000'000);
    std::uniform_int_distribution<int> coin(0, 2);
    std::vector<Rat> inf(spec_.levels());
    for (auto& q : inf) q = coin(rng_) == 0 ? Rat(0) : rational();
    return NonstdInt(std::move(inf), Int(fin(rng_)));
  }

  /// Element of O(a): nothing above a_j's level in coordinate j.
  ModelTuple bounded_element() {
    ModelTuple x;
    for (const auto& a : spec_.lattice.scale().a) {
      NonstdInt c = model_element();
      std::vector<Rat> inf = c.infinite();
      for (std::size_t l = 0; l < a.leading_level(); ++l) inf[l] = 0;
      x.emplace_back(std::move(inf), c.finite());
    }
    return x;
  }

  ModelTuple reduced() { return reduce(bounded_element(), spec_.lattice).rep; }

  ModelTuple u_part() {
    ModelTuple u;
    for (std::size_t i = 0; i < spec_.r; ++i) u.push_back(model_element());
    return u;
  }

  ExtElement element() { return {u_part(), reduced()}; }

  std::mt19937_64& rng() { return rng_; }

 private:
  const ExtGroupSpec& spec_;
  std::mt19937_64 rng_;
};

struct ExtensionReport {
  bool pass = true;
  std::map<std::string, std::uint64_t> checks;  // per law
  std::vector<std::string> failures;            // first witness per law
  std::size_t ubd_kernel = 0;                   // ubd of Z^r
  std::size_t ubd_quotient = 0;                 // ubd of the box holding X_1

  void check(bool ok, const std::string& law, const std::string& witness) {
    ++checks[law];
    if (ok) return;
    if (pass || failures.size() < 16) failures.push_back(law + ": " + witness);
    pass = false;
  }
};

namespace detail {

/// Half-width n with |x_j| < n a_j on the fundamental parallelepiped.
inline std::vector<Int> domain_widths(const LocalLattice& lattice) {
  std::vector<Int> out;
  for (const auto& row : lattice.basis()) {
    Rat w = 1;
    for (const auto& c : row) w += abs(c);
    out.push_back(floor(w) + 1);
  }
  return out;
}

/// {x : -n_j a_j < x_j < n_j a_j}, with the scale as parameters a_1..a_s.
inline Formula domain_box(const std::vector<Int>& widths, const std::vector<std::string>& xs,
                          const std::vector<std::string>& as) {
  std::vector<Formula> parts;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    LinearTerm x = LinearTerm::var(xs[j]);
    LinearTerm na = LinearTerm::var(as[j], widths[j]);
    parts.push_back(Formula::gt(na - x));
    parts.push_back(Formula::gt(na + x));
  }
  return Formula::conj(parts);
}

}  // namespace detail

/// Sampled exactness of 0 -> Z^r -> G -> C(a,b) -> 0, the group laws, the
/// cocycle identities, the effect of changing the section, the pushout square for Lambda -> Z^r, b_i -> -v_i,
/// and the ubd accounting ubd(G) = ubd(Z^r) + ubd(C(a,b)).
inline ExtensionReport verify_extension(const ExtGroupSpec& spec, std::uint64_t trials, std::uint64_t seed) {
  ExtensionReport rep;
  ExtSampler gen(spec, seed);
  ExtElement zero = ext_zero(spec);
  auto add = [&](const ExtElement& g, const ExtElement& h) { return ext_add(g, h, spec); };
  auto neg = [&](const ExtElement& g) { return ext_neg(g, spec); };
  auto section = [&](const ModelTuple& x) { return ExtElement{zero_tuple(spec.r, spec.levels()), x}; };
  // Another section s' = s + i(h), h an arbitrary map X_1 -> Z^r.
  auto h = [&](const ModelTuple& x) {
    ModelTuple out;
    for (std::size_t k = 0; k < spec.r; ++k) {
      const NonstdInt& c = x[k % x.size()];
      NonstdInt v(spec.levels(), c.finite() % 17 + Int(k));
      if (spec.levels() > 0 && c.infinite().back() > 0) v += NonstdInt::unit(spec.levels(), 0);
      out.push_back(v);
    }
    return out;
  };
  auto shifted = [&](const ModelTuple& x) { return ExtElement{h(x), x}; };

  for (std::size_t i = 0; i < spec.s(); ++i) {
    ExtElement image = ext_make(zero_tuple(spec.r, spec.levels()), spec.lattice.generators()[i], spec);
    rep.check(image == ext_include(-spec.twists[i], spec), "pushout square", "b_" + std::to_string(i + 1) + " -> " + image.to_string());
  }

  for (std::uint64_t t = 0; t < trials; ++t) {
    ExtElement a = gen.element(), b = gen.element(), c = gen.element();
    std::string w = a.to_string() + " " + b.to_string() + " " + c.to_string();
    rep.check(add(add(a, b), c) == add(a, add(b, c)), "associativity", w);
    rep.check(add(a, b) == add(b, a), "commutativity", w);
    rep.check(add(a, zero) == a, "identity", w);
    rep.check(add(a, neg(a)) == zero, "inverse", w);

    ModelTuple u1 = gen.u_part(), u2 = gen.u_part();
    rep.check(add(ext_include(u1, spec), ext_include(u2, spec)) == ext_include(u1 + u2, spec), "j is a morphism", w);
    rep.check(ext_include(u1, spec) != zero || is_zero(u1), "j is injective", tuple_string(u1));
    rep.check(ext_project(ext_include(u1, spec)) == zero.x, "q after j is zero", tuple_string(u1));
    rep.check(ext_project(add(a, b)) == quotient_add(a.x, b.x, spec.lattice), "q is a morphism", w);
    rep.check(ext_project(section(c.x)) == c.x, "q is onto", c.to_string());
    ExtElement k = add(a, neg(section(a.x)));
    rep.check(is_zero(ext_project(k)) && k == ext_include(k.u, spec), "ker q is im j", a.to_string());

    auto sa = std_part(a.x, spec.lattice.scale()), sb = std_part(b.x, spec.lattice.scale());
    auto sab = std_part(a.x + b.x, spec.lattice.scale());
    bool morphism = true;
    for (std::size_t j = 0; j < sa.size(); ++j) morphism = morphism && sab[j] == sa[j] + sb[j];
    rep.check(morphism, "std_part is a morphism", w);
    ModelTuple d = gen.bounded_element();
    bool null = true;
    for (const auto& q : std_part(d, spec.lattice.scale())) null = null && q == 0;
    rep.check(null == in_o(d, spec.lattice.scale()), "ker std_part is o(a)", tuple_string(d));

    ModelTuple gab = cocycle(a.x, b.x, spec);
    rep.check(gab == cocycle(b.x, a.x, spec), "cocycle symmetry", w);
    ModelTuple ab = quotient_add(a.x, b.x, spec.lattice), bc = quotient_add(b.x, c.x, spec.lattice);
    rep.check(gab + cocycle(ab, c.x, spec) == cocycle(b.x, c.x, spec) + cocycle(a.x, bc, spec), "cocycle identity", w);
    rep.check(gab == section_cocycle(a.x, b.x, section, spec), "cocycle matches the group law", w);
    rep.check(section_cocycle(a.x, b.x, shifted, spec) == gab + h(ab) - h(a.x) - h(b.x), "coboundary change", w);
    rep.check(spec.lattice.is_reduced(ab) && ab == reduce(ab, spec.lattice).rep, "reduce is idempotent", w);
  }

  std::vector<std::string> us, xs, as;
  for (std::size_t i = 0; i < spec.r; ++i) us.push_back("u" + std::to_string(i + 1));
  for (std::size_t j = 0; j < spec.s(); ++j) {
    xs.push_back("x" + std::to_string(j + 1));
    as.push_back("a" + std::to_string(j + 1));
  }
  std::vector<Formula> everything;
  for (const auto& u : us) everything.push_back(Formula::eq(LinearTerm::var(u) - LinearTerm::var(u)));
  rep.ubd_kernel = ubd(Formula::conj(everything), us);
  rep.check(rep.ubd_kernel == spec.r, "ubd of Z^r is r", std::to_string(rep.ubd_kernel));
  auto widths = detail::domain_widths(spec.lattice);
  Formula box = detail::domain_box(widths, xs, as);
  Formula bounded = bounded_condition(box, xs);
  rep.check(valid(bounded), "fundamental domain is bounded", to_string(bounded));
  rep.ubd_quotient = valid(bounded) ? 0 : 1;
  Assignment<NonstdInt> at;
  for (std::size_t j = 0; j < spec.s(); ++j) at[as[j]] = spec.lattice.scale().a[j];
  for (std::uint64_t t = 0; t < std::min<std::uint64_t>(trials, 200); ++t) {
    ModelTuple x = gen.reduced();
    for (std::size_t j = 0; j < spec.s(); ++j) at[xs[j]] = x[j];
    rep.check(eval(box, at), "fundamental domain lies in the box", tuple_string(x));
  }
  return rep;
}

}  // namespace presburger
