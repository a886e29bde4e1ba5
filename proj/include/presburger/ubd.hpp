// Degree of unboundedness and the normal form: a piecewise-affine bijection
// from X' in Z>=0^r x [0,a)^s onto a definable set X.
//
// The construction follows the induction on the number of coordinates.
// X is decomposed into cells; for a cell with last coordinate z the prefix
// cell is normalized first, then z is parametrized over each prefix piece:
//   no bounds          z = k + N t  or  z = k - N - N t
//   lower bound f      z = f + j + N t
//   upper bound g      z = g - j - N t
//   both               z = f + j + N t with 0 <= t <= H,  H = (g - f - j - 1)/N
// where j is fixed by the residue of f (resp. g) mod N. When H still depends
// on an unbounded coordinate u with positive coefficient h, the set
// {0 <= t <= H} splits into D = {t <= H - h u} and E = {t > H - h u}; D is a
// product with the u axis and E is parametrized by u = ceil((t - H + h u)/h) + s.
// Both are sets in one coordinate fewer and are normalized recursively.
#pragma once

#include "presburger/cells.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace presburger {

/// One affine piece: coordinates `free` range over Z>=0, coordinates
/// `bounded` over the bounded set `guard` (with 0 <= b < cap), and the
/// point of X is `image`.
struct NormalPiece {
  std::vector<std::string> free;
  std::vector<std::string> bounded;
  std::vector<AffineForm> caps;
  Formula guard = Formula::truth();
  std::map<std::string, AffineForm> image;
  Formula region = Formula::truth();   // cell of X the piece parametrizes

  std::size_t rank() const { return free.size(); }

  Formula domain() const {
    std::vector<Formula> parts{guard};
    for (const auto& u : free) parts.push_back(Formula::gt(LinearTerm::var(u) + LinearTerm(1)));
    return Formula::conj(std::move(parts));
  }
};

/// X' and the bijection X' -> X. Coordinates of X' are `coords` =
/// (n_1..n_r, m_1..m_s) with n_i >= 0 and 0 <= m_j < max(bounds[j], 1): a
/// slot a piece does not use holds 0, also where a parametric bound is <= 0.
struct NormalForm {
  std::vector<std::string> vars;
  std::vector<std::string> params;
  std::size_t r = 0;
  std::size_t s = 0;
  std::vector<std::string> coords;
  std::vector<AffineForm> bounds;

  struct Piece {
    std::size_t rank = 0;
    Formula domain;                 // subset of X', over coords and params
    std::vector<AffineForm> rule;   // point of X, one form per var
    Formula region;                 // cell of X containing the image
  };

  /// Which piece a point of X' belongs to: n_1 mod P when r > 0, else the
  /// last bounded coordinate (a tag) when there are several pieces.
  std::size_t selector(const std::map<std::string, Int>& point) const {
    if (pieces.size() <= 1) return 0;
    const Int& v = point.at(r > 0 ? coords[0] : coords.back());
    return static_cast<std::size_t>(mod(v, Int(pieces.size())).get_ui());
  }

  /// Formula stating that a point of X' has selector p.
  Formula selector_is(std::size_t p) const {
    if (pieces.size() <= 1) return Formula::truth();
    LinearTerm v = LinearTerm::var(r > 0 ? coords[0] : coords.back()) - LinearTerm(Int(p));
    return r > 0 ? Formula::divides(Int(pieces.size()), v) : Formula::eq(v);
  }
  std::vector<Piece> pieces;
  std::vector<Formula> obligations;   // see NormalFormBuilder::obligations

  Formula source() const {
    std::vector<Formula> d;
    for (const auto& p : pieces) d.push_back(p.domain);
    return Formula::disj(std::move(d));
  }
};

namespace detail {

inline AffineForm compose(const AffineForm& a, const std::map<std::string, AffineForm>& sub) {
  AffineForm out(a.constant());
  for (const auto& [v, c] : a.coeffs()) {
    auto it = sub.find(v);
    out += (it == sub.end() ? AffineForm::var(v) : it->second) * c;
  }
  return out;
}

inline Formula nonneg(const std::string& v) { return Formula::gt(LinearTerm::var(v) + LinearTerm(1)); }

class NormalFormBuilder {
 public:
  NormalFormBuilder(std::vector<std::string> params, std::set<std::string> reserved)
      : params_(std::move(params)), reserved_(std::move(reserved)) {}

  /// Pieces of one cell of the top-level set, tagged with the cell.
  std::vector<NormalPiece> top_level(const Formula& set, const std::vector<std::string>& coords) {
    if (coords.empty()) return run(set, coords);
    std::vector<NormalPiece> out;
    Decomposition d = decompose(set, {}, {}, coords, params_);
    for (const auto& piece : d.pieces) {
      std::size_t first = out.size();
      cell_pieces(piece.cell, coords, out);
      Formula region = cell_to_formula(piece.cell);
      for (std::size_t i = first; i < out.size(); ++i) out[i].region = region;
    }
    return out;
  }

  std::vector<NormalPiece> run(const Formula& set, const std::vector<std::string>& coords) {
    std::vector<NormalPiece> out;
    if (coords.empty()) {
      Formula g = eliminate(set);
      if (satisfiable(g)) out.push_back(NormalPiece{{}, {}, {}, g, {}});
      return out;
    }
    Decomposition d = decompose(set, {}, {}, coords, params_);
    std::vector<Formula> cells;
    for (const auto& piece : d.pieces) {
      cells.push_back(cell_to_formula(piece.cell));
      cell_pieces(piece.cell, coords, out);
    }
    obligations_.push_back(Formula::implies(set, Formula::disj(cells)));
    return out;
  }

  /// Sentences (universally closed) whose validity makes every step of the
  /// construction onto its target: cells cover their set, residue classes
  /// cover a prefix, each fibre point is reached by some t >= 0, and each
  /// point of an E-part has s >= 0.
  const std::vector<Formula>& obligations() const { return obligations_; }

 private:
  std::string fresh() {
    std::string n;
    do n = "_k" + std::to_string(counter_++);
    while (reserved_.count(n));
    return n;
  }

  bool nonempty(const NormalPiece& p) { return satisfiable(p.guard); }

  // Upper bound, affine in the parameters, of a form over bounded coordinates.
  static AffineForm upper_estimate(const AffineForm& a, const NormalPiece& p) {
    AffineForm out = a;
    for (std::size_t i = 0; i < p.bounded.size(); ++i) {
      Rat c = a.coeff(p.bounded[i]);
      out = out.substitute(p.bounded[i], c > 0 ? p.caps[i] - AffineForm(Rat(1)) : AffineForm(Rat(0)));
    }
    return out;
  }

  AffineForm cap_from(const AffineForm& ub) const {
    if (ub.is_constant()) return AffineForm(Rat(floor(ub.constant()) + 1));
    return ub + AffineForm(Rat(1));
  }

  void cell_pieces(const Cell& cell, const std::vector<std::string>& coords, std::vector<NormalPiece>& out) {
    std::size_t n = coords.size();
    const std::string& z = coords[n - 1];
    std::vector<std::string> prefix(coords.begin(), coords.end() - 1);
    const CellLevel& lv = cell.levels[cell.num_params + n - 1];
    Formula below_cell = cell_to_formula(cell, cell.num_params + n - 1);
    const Int& N = lv.modulus;
    const Int& k = lv.residue;

    Formula whole_cell = cell_to_formula(cell, cell.num_params + n);
    LinearTerm zv = LinearTerm::var(z);
    if (!lv.lower && !lv.upper) {
      obligations_.push_back(Formula::implies(whole_cell, Formula::disj({Formula::gt(zv - LinearTerm(k) + LinearTerm(1)),
                                                                         Formula::gt(LinearTerm(k - N + 1) - zv)})));
      for (const auto& p : run(below_cell, prefix)) {
        for (int side = 0; side < 2; ++side) {
          NormalPiece q = p;
          std::string t = fresh();
          q.free.push_back(t);
          AffineForm tv = AffineForm::var(t, Rat(N));
          q.image[z] = side == 0 ? AffineForm(Rat(k)) + tv : AffineForm(Rat(k - N)) - tv;
          out.push_back(std::move(q));
        }
      }
      return;
    }
    // The bound whose residue mod N fixes the offset j.
    const AffineForm& anchor = lv.lower ? *lv.lower : *lv.upper;
    std::vector<Formula> classes;
    for (Int rho = 0; rho < N; ++rho) classes.push_back(divides_form(N, anchor - AffineForm(Rat(rho))));
    if (N > 1) obligations_.push_back(Formula::implies(below_cell, Formula::disj(classes)));
    for (Int rho = 0; rho < N; ++rho) {
      Formula sub = N == 1 ? below_cell : Formula::conj({below_cell, classes[rho.get_ui()]});
      // lower: anchor + j = k (mod N); upper: anchor - j = k (mod N)
      Int j = lv.lower ? mod(k - rho - 1, N) + 1 : mod(rho - k - 1, N) + 1;
      {
        // Every z of the cell over this class is anchor +- (j + N t), t >= 0.
        std::string t = fresh();
        AffineForm step = AffineForm(Rat(j)) + AffineForm::var(t, Rat(N));
        std::vector<Formula> reach{detail::nonneg(t), equals(zv, lv.lower ? anchor + step : anchor - step)};
        if (lv.lower && lv.upper) reach.push_back(greater(*lv.upper, anchor + step));
        obligations_.push_back(Formula::implies(Formula::conj({whole_cell, sub}), Formula::exists(t, Formula::conj(reach))));
      }
      for (const auto& p : run(sub, prefix)) {
        AffineForm f = compose(anchor, p.image);
        std::string t = fresh();
        AffineForm zt = lv.lower ? f + AffineForm(Rat(j)) + AffineForm::var(t, Rat(N))
                                 : f - AffineForm(Rat(j)) - AffineForm::var(t, Rat(N));
        if (!lv.lower || !lv.upper) {
          NormalPiece q = p;
          q.free.push_back(t);
          q.image[z] = zt;
          out.push_back(std::move(q));
          continue;
        }
        AffineForm g = compose(*lv.upper, p.image);
        AffineForm H = (g - f - AffineForm(Rat(j + 1))) * Rat(1, N);
        for (auto& q : fiber(p, H, t)) {
          std::map<std::string, AffineForm> img;
          for (const auto& [c, form] : p.image) img[c] = compose(form, q.image);
          img[z] = compose(zt, q.image);
          q.image = std::move(img);
          out.push_back(std::move(q));
        }
      }
    }
  }

  // Pieces of {(d, t) : d in dom p, 0 <= t <= H(d)}, with images over the
  // coordinates of p and t.
  std::vector<NormalPiece> fiber(const NormalPiece& p, const AffineForm& H, const std::string& t) {
    std::vector<std::string> pos, neg, zero;
    for (const auto& u : p.free) {
      Rat h = H.coeff(u);
      (h > 0 ? pos : h < 0 ? neg : zero).push_back(u);
    }
    std::map<std::string, AffineForm> identity;
    for (const auto& u : p.free) identity[u] = AffineForm::var(u);
    for (const auto& b : p.bounded) identity[b] = AffineForm::var(b);

    LinearTerm tt = LinearTerm::var(t);
    if (pos.empty()) {
      // Every coordinate H depends on is bounded by H >= 0.
      NormalPiece q;
      q.free = zero;
      q.bounded = p.bounded;
      q.caps = p.caps;
      std::vector<Formula> g{p.guard};
      AffineForm rest = H;
      for (const auto& u : neg) rest = rest.substitute(u, AffineForm(Rat(0)));
      AffineForm ub = upper_estimate(rest, p);
      for (const auto& u : neg) {
        q.bounded.push_back(u);
        q.caps.push_back(cap_from(ub * (Rat(1) / abs(H.coeff(u)))));
        g.push_back(nonneg(u));
      }
      q.image = identity;
      if (H.is_constant() && H.constant() < 1 && neg.empty()) {
        // 0 <= t <= H < 1: t is 0 or the fiber is empty.
        if (H.constant() < 0) return {};
        q.image[t] = AffineForm(Rat(0));
      } else {
        q.bounded.push_back(t);
        q.caps.push_back(cap_from(ub));
        g.push_back(Formula::gt(tt + LinearTerm(1)));
        g.push_back(greater_eq(H, AffineForm::var(t)));
        q.image[t] = AffineForm::var(t);
      }
      q.guard = normalize(Formula::conj(g));
      if (!nonempty(q)) return {};
      return {q};
    }

    const std::string u = pos.front();
    Rat h = H.coeff(u);
    AffineForm R = H.substitute(u, AffineForm(Rat(0)));
    std::vector<std::string> rest;
    std::vector<Formula> base{p.guard, Formula::gt(tt + LinearTerm(1))};
    for (const auto& v : p.free)
      if (v != u) {
        rest.push_back(v);
        base.push_back(nonneg(v));
      }
    rest.insert(rest.end(), p.bounded.begin(), p.bounded.end());
    rest.push_back(t);

    std::vector<NormalPiece> out;
    // D: t <= R, any u >= 0.
    {
      std::vector<Formula> dset = base;
      dset.push_back(greater_eq(R, AffineForm::var(t)));
      for (auto& q : run(Formula::conj(dset), rest)) {
        q.free.insert(q.free.begin(), u);
        q.image[u] = AffineForm::var(u);
        out.push_back(std::move(q));
      }
    }
    // E: t > R, u = ceil((t - R)/h) + s.
    {
      AffineForm w = (AffineForm::var(t) - R) * (Rat(1) / h);
      auto [num, den] = w.cleared();
      std::vector<Formula> reach;
      for (Int sigma = 0; sigma < den; ++sigma)
        reach.push_back(Formula::conj({Formula::divides(den, num + LinearTerm(sigma)),
                                       Formula::gt(LinearTerm::var(u, den) - num - LinearTerm(sigma) + LinearTerm(1))}));
      obligations_.push_back(Formula::implies(
          Formula::conj({p.domain(), Formula::gt(tt + LinearTerm(1)), greater_eq(H, AffineForm::var(t)), greater(AffineForm::var(t), R)}),
          Formula::disj(reach)));
      for (Int sigma = 0; sigma < den; ++sigma) {
        std::vector<Formula> eset = base;
        eset.push_back(greater(AffineForm::var(t), R));
        if (den > 1) eset.push_back(Formula::divides(den, num + LinearTerm(sigma)));
        for (auto& q : run(Formula::conj(eset), rest)) {
          std::string s = fresh();
          q.free.insert(q.free.begin(), s);
          q.image[u] = compose(AffineForm(num + LinearTerm(sigma), den), q.image) + AffineForm::var(s);
          out.push_back(std::move(q));
        }
      }
    }
    return out;
  }

  std::vector<std::string> params_;
  std::set<std::string> reserved_;
  std::size_t counter_ = 0;
  std::vector<Formula> obligations_;
};

// Slot assignment for bounded coordinates: constant caps share slots (the
// bound is their maximum), parametric caps share a slot only when equal.
struct Slots {
  std::vector<AffineForm> bounds;
  std::vector<std::vector<std::size_t>> of_piece;
};

inline Slots assign_slots(const std::vector<NormalPiece>& pieces) {
  Slots s;
  for (const auto& p : pieces) {
    std::vector<std::size_t> mine;
    std::set<std::size_t> used;
    for (const auto& cap : p.caps) {
      std::size_t slot = s.bounds.size();
      for (std::size_t j = 0; j < s.bounds.size(); ++j) {
        if (used.count(j)) continue;
        if ((cap.is_constant() && s.bounds[j].is_constant()) || cap == s.bounds[j]) {
          slot = j;
          break;
        }
      }
      if (slot == s.bounds.size()) {
        s.bounds.push_back(cap);
      } else if (cap.is_constant() && cap.constant() > s.bounds[slot].constant()) {
        s.bounds[slot] = cap;
      }
      used.insert(slot);
      mine.push_back(slot);
    }
    s.of_piece.push_back(std::move(mine));
  }
  return s;
}

}  // namespace detail

/// Normal form of X over `vars`; remaining free variables must be listed
/// in `params`.
inline NormalForm normal_form(const Formula& X, const std::vector<std::string>& vars,
                              const std::vector<std::string>& params = {}) {
  std::set<std::string> reserved(vars.begin(), vars.end());
  reserved.insert(params.begin(), params.end());
  for (const auto& v : all_vars(X)) reserved.insert(v);
  detail::NormalFormBuilder builder(params, reserved);
  std::vector<NormalPiece> pieces = builder.top_level(X, vars);
  // Rank descending; construction order within a rank.
  std::stable_sort(pieces.begin(), pieces.end(),
                   [](const NormalPiece& a, const NormalPiece& b) { return a.rank() > b.rank(); });

  NormalForm nf;
  nf.vars = vars;
  nf.params = params;
  nf.obligations = builder.obligations();
  for (const auto& p : pieces) nf.r = std::max(nf.r, p.rank());
  detail::Slots slots = detail::assign_slots(pieces);
  std::size_t P = pieces.size();
  bool tag = nf.r == 0 && P > 1;
  nf.bounds = slots.bounds;
  if (tag) nf.bounds.push_back(AffineForm(Rat(P)));
  nf.s = nf.bounds.size();

  for (std::size_t i = 0; i < nf.r; ++i) nf.coords.push_back(fresh_name("n" + std::to_string(i + 1), reserved));
  for (std::size_t j = 0; j < nf.s; ++j) nf.coords.push_back(fresh_name("m" + std::to_string(j + 1), reserved));
  auto n_var = [&](std::size_t i) { return LinearTerm::var(nf.coords[i]); };
  auto m_var = [&](std::size_t j) { return LinearTerm::var(nf.coords[nf.r + j]); };

  for (std::size_t p = 0; p < P; ++p) {
    const NormalPiece& piece = pieces[p];
    std::map<std::string, AffineForm> sub;
    std::vector<Formula> dom;
    for (std::size_t i = 0; i < nf.r; ++i) {
      LinearTerm n = n_var(i);
      if (i == 0 && P > 1) {
        if (piece.rank() >= 1) {
          // n_1 = P*u_1 + p
          dom.push_back(Formula::divides(Int(P), n - LinearTerm(Int(p))));
          dom.push_back(Formula::gt(n - LinearTerm(Int(p)) + LinearTerm(1)));
          sub[piece.free[0]] = AffineForm(n - LinearTerm(Int(p)), Int(P));
        } else {
          dom.push_back(Formula::eq(n - LinearTerm(Int(p))));
        }
      } else if (i < piece.rank()) {
        dom.push_back(Formula::gt(n + LinearTerm(1)));
        sub[piece.free[i]] = AffineForm(n);
      } else {
        dom.push_back(Formula::eq(n));
      }
    }
    std::set<std::size_t> used;
    for (std::size_t b = 0; b < piece.bounded.size(); ++b) {
      std::size_t slot = slots.of_piece[p][b];
      used.insert(slot);
      sub[piece.bounded[b]] = AffineForm(m_var(slot));
    }
    for (std::size_t j = 0; j < slots.bounds.size(); ++j)
      if (!used.count(j)) dom.push_back(Formula::eq(m_var(j)));
    if (tag) dom.push_back(Formula::eq(m_var(nf.s - 1) - LinearTerm(Int(p))));
    Formula guard = piece.guard;
    for (std::size_t b = 0; b < piece.bounded.size(); ++b)
      guard = substitute(guard, piece.bounded[b], m_var(slots.of_piece[p][b]));
    dom.push_back(guard);

    NormalForm::Piece out;
    out.rank = piece.rank();
    out.region = piece.region;
    out.domain = normalize(Formula::conj(std::move(dom)));
    for (const auto& v : vars) out.rule.push_back(detail::compose(piece.image.at(v), sub));
    nf.pieces.push_back(std::move(out));
  }
  return nf;
}

/// The point of X for a point of X' (nullopt outside X').
inline std::optional<std::vector<Int>> map_point(const NormalForm& nf, const std::map<std::string, Int>& point) {
  if (nf.pieces.empty()) return std::nullopt;
  std::size_t p = nf.selector(point);
  if (p >= nf.pieces.size()) return std::nullopt;
  const auto& piece = nf.pieces[p];
  if (!eval(piece.domain, Assignment<Int>(point.begin(), point.end()))) return std::nullopt;
  std::vector<Int> out;
  for (const auto& f : piece.rule) {
    Rat v = f.eval(point);
    if (!is_integer(v)) return std::nullopt;
    out.push_back(v.get_num());
  }
  return out;
}

/// Degree of unboundedness of a parameter-free set.
inline std::size_t ubd(const Formula& X, const std::vector<std::string>& vars) { return normal_form(X, vars).r; }

/// Condition on the parameters under which the piece is nonempty.
inline Formula piece_condition(const NormalForm& nf, std::size_t p) {
  Formula f = nf.pieces[p].domain;
  for (auto it = nf.coords.rbegin(); it != nf.coords.rend(); ++it) f = Formula::exists(*it, f);
  return eliminate(f);
}

/// Parameters for which ubd(X_params) = n.
inline Formula ubd_layer(const NormalForm& nf, std::size_t n) {
  std::vector<Formula> at_least, above;
  for (std::size_t p = 0; p < nf.pieces.size(); ++p) {
    Formula c = piece_condition(nf, p);
    if (nf.pieces[p].rank >= n) at_least.push_back(c);
    if (nf.pieces[p].rank > n) above.push_back(c);
  }
  if (n == 0) at_least.push_back(Formula::truth());
  return eliminate(Formula::conj({Formula::disj(at_least), Formula::neg(Formula::disj(above))}));
}

/// ubd of the fibre X_params at a valuation of the parameters in M_s.
inline std::size_t ubd_at(const NormalForm& nf, const Assignment<NonstdInt>& valuation) {
  std::size_t best = 0;
  for (std::size_t p = 0; p < nf.pieces.size(); ++p)
    if (nf.pieces[p].rank > best && eval(piece_condition(nf, p), valuation)) best = nf.pieces[p].rank;
  return best;
}

/// Condition on the parameters for X to be bounded: exists M. forall x in X. |x_i| < M.
inline Formula bounded_condition(const Formula& X, const std::vector<std::string>& vars) {
  std::set<std::string> used = all_vars(X);
  used.insert(vars.begin(), vars.end());
  std::string M = fresh_name("M", used);
  std::vector<Formula> box;
  for (const auto& v : vars) {
    box.push_back(Formula::gt(LinearTerm::var(M) - LinearTerm::var(v)));
    box.push_back(Formula::gt(LinearTerm::var(M) + LinearTerm::var(v)));
  }
  Formula f = Formula::implies(X, Formula::conj(box));
  for (auto it = vars.rbegin(); it != vars.rend(); ++it) f = Formula::forall(*it, f);
  return eliminate(Formula::exists(M, f));
}

inline bool is_bounded(const Formula& X, const std::vector<std::string>& vars) {
  Formula c = bounded_condition(X, vars);
  if (!free_vars(c).empty()) throw std::invalid_argument("is_bounded: set has parameters; use bounded_condition");
  return decide(c);
}

// ---------------------------------------------------------------------------
// Certificates

struct NormalFormReport {
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

inline std::vector<AffineForm> renamed(const std::vector<AffineForm>& rule, const std::map<std::string, std::string>& names) {
  std::map<std::string, AffineForm> sub;
  for (const auto& [a, b] : names) sub[a] = AffineForm::var(b);
  std::vector<AffineForm> out;
  for (const auto& f : rule) out.push_back(compose(f, sub));
  return out;
}

}  // namespace detail

/// Decide-certified bijectivity of the normal form onto X. Pieces of X' are
/// told apart by their selector class; each image lies in the cell of X the
/// piece came from, those cells are disjoint and cover X, and within a cell
/// the images are disjoint. Each rule is integral and injective, and X' lies
/// in Z>=0^r x [0,a)^s. Onto-ness is checked step by step through the
/// builder's obligations rather than on the composed images.
inline NormalFormReport certify(const NormalForm& nf, const Formula& X) {
  NormalFormReport rep;
  Formula x = eliminate(X);
  std::set<std::string> used = all_vars(x);
  used.insert(nf.coords.begin(), nf.coords.end());
  used.insert(nf.vars.begin(), nf.vars.end());
  std::map<std::string, std::string> primed;
  for (const auto& c : nf.coords) {
    primed[c] = fresh_name(c + "_", used);
    used.insert(primed[c]);
  }
  std::vector<Formula> in_box;
  for (std::size_t i = 0; i < nf.r; ++i) in_box.push_back(detail::nonneg(nf.coords[i]));
  for (std::size_t j = 0; j < nf.s; ++j) {
    LinearTerm m = LinearTerm::var(nf.coords[nf.r + j]);
    in_box.push_back(detail::nonneg(nf.coords[nf.r + j]));
    in_box.push_back(Formula::disj({Formula::eq(m), below(m, nf.bounds[j])}));
  }
  Formula box = Formula::conj(in_box);

  // Per-piece checks run on the selector class n_1 = P*u + p, which keeps
  // the modulus P out of the eliminations; membership in the class is
  // checked on the original domain.
  std::size_t P = nf.pieces.size();
  bool unfold = nf.r > 0 && P > 1;
  std::vector<std::string> coords = nf.coords;
  std::string u;
  if (unfold) {
    u = fresh_name("u", used);
    used.insert(u);
    coords[0] = u;
    primed[u] = fresh_name(u + "_", used);
    used.insert(primed[u]);
  }
  std::vector<Formula> domains;
  std::vector<std::vector<AffineForm>> rules;
  for (std::size_t p = 0; p < P; ++p) {
    const auto& piece = nf.pieces[p];
    if (!unfold) {
      domains.push_back(piece.domain);
      rules.push_back(piece.rule);
      continue;
    }
    LinearTerm n1 = LinearTerm::var(u, Int(P)) + LinearTerm(Int(p));
    domains.push_back(normalize(substitute(piece.domain, nf.coords[0], n1)));
    std::map<std::string, AffineForm> sub{{nf.coords[0], AffineForm(n1)}};
    std::vector<AffineForm> rule;
    for (const auto& f : piece.rule) rule.push_back(detail::compose(f, sub));
    rules.push_back(std::move(rule));
  }

  std::vector<Formula> regions;
  std::vector<std::size_t> region_of;
  for (std::size_t p = 0; p < P; ++p) {
    const auto& piece = nf.pieces[p];
    auto it = std::find(regions.begin(), regions.end(), piece.region);
    region_of.push_back(static_cast<std::size_t>(it - regions.begin()));
    if (it == regions.end()) regions.push_back(piece.region);
  }

  for (std::size_t i = 0; i < regions.size(); ++i)
    for (std::size_t j = i + 1; j < regions.size(); ++j)
      rep.check(!satisfiable(Formula::conj({regions[i], regions[j]})),
                "cells " + std::to_string(i) + " and " + std::to_string(j) + " of X overlap");
  bool onto = true;
  for (const auto& part : dnf(x)) onto = onto && detail::covered(part, regions, 0);
  rep.check(onto, "cells do not cover X");
  for (const auto& region : regions) rep.check(valid(Formula::implies(region, x)), "cell leaves X");

  for (std::size_t p = 0; p < nf.pieces.size(); ++p) {
    const auto& piece = nf.pieces[p];
    std::string name = "piece " + std::to_string(p);
    rep.check(!satisfiable(Formula::conj({piece.domain, Formula::neg(nf.selector_is(p))})), name + ": domain leaves its class");
    Formula in_box = box;
    if (unfold) in_box = substitute(box, nf.coords[0], LinearTerm::var(u, Int(P)) + LinearTerm(Int(p)));
    rep.check(valid(Formula::implies(domains[p], in_box)), name + ": domain leaves Z>=0^r x [0,a)^s");
    std::vector<Formula> integer;
    for (const auto& f : rules[p]) integer.push_back(integral(f));
    rep.check(valid(Formula::implies(domains[p], Formula::conj(integer))), name + ": rule is not integral");
    Formula target = piece.region;
    for (std::size_t i = 0; i < nf.vars.size(); ++i) {
      auto [num, den] = rules[p][i].cleared();
      target = detail::substitute_scaled(target, nf.vars[i], num, den);
    }
    rep.check(valid(Formula::implies(domains[p], target)), name + ": image leaves its cell");
    Formula dom2 = rename_free(domains[p], primed);
    auto rule2 = detail::renamed(rules[p], primed);
    std::vector<Formula> same_point, same_source;
    for (std::size_t i = 0; i < nf.vars.size(); ++i)
      same_point.push_back(Formula::eq((rules[p][i] - rule2[i]).cleared().first));
    for (const auto& c : coords) same_source.push_back(Formula::eq(LinearTerm::var(c) - LinearTerm::var(primed.at(c))));
    rep.check(valid(Formula::implies(Formula::conj({domains[p], dom2, Formula::conj(same_point)}), Formula::conj(same_source))),
              name + ": rule is not injective");
    for (std::size_t q = p + 1; q < nf.pieces.size(); ++q) {
      if (region_of[q] != region_of[p]) continue;
      auto rule_q = detail::renamed(rules[q], primed);
      std::vector<Formula> meet{domains[p], rename_free(domains[q], primed)};
      for (std::size_t i = 0; i < nf.vars.size(); ++i) meet.push_back(Formula::eq((rules[p][i] - rule_q[i]).cleared().first));
      rep.check(!satisfiable(Formula::conj(meet)),
                "images of pieces " + std::to_string(p) + " and " + std::to_string(q) + " meet");
    }
  }
  for (std::size_t i = 0; i < nf.obligations.size(); ++i)
    rep.check(valid(nf.obligations[i]), "construction step " + std::to_string(i) + " is not onto");
  return rep;
}

// ---------------------------------------------------------------------------
// Union and product laws

struct LawsReport {
  std::size_t ubd_x = 0, ubd_y = 0, ubd_union = 0, ubd_product = 0;
  bool union_law = false, product_law = false;
  bool pass() const { return union_law && product_law; }
};

/// ubd(X u Y) = max(ubd X, ubd Y) and ubd(X x Y) = ubd X + ubd Y, for
/// parameter-free X over xs and Y over ys of the same arity. Y's variables
/// are renamed to xs for the union and kept apart for the product. The
/// product law needs both factors nonempty; with an empty factor the
/// product is checked to be empty instead.
inline LawsReport product_union_laws(const Formula& X, const std::vector<std::string>& xs, const Formula& Y,
                                     const std::vector<std::string>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("union law needs sets of the same arity");
  LawsReport rep;
  rep.ubd_x = ubd(X, xs);
  rep.ubd_y = ubd(Y, ys);
  std::map<std::string, std::string> onto;
  for (std::size_t i = 0; i < xs.size(); ++i) onto[ys[i]] = xs[i];
  rep.ubd_union = ubd(Formula::disj({X, rename_free(Y, onto)}), xs);
  std::set<std::string> used = all_vars(X);
  for (const auto& v : all_vars(Y)) used.insert(v);
  used.insert(xs.begin(), xs.end());
  std::map<std::string, std::string> apart;
  std::vector<std::string> prod = xs;
  for (const auto& y : ys) {
    std::string n = fresh_name(y + "_", used);
    used.insert(n);
    apart[y] = n;
    prod.push_back(n);
  }
  Formula product = Formula::conj({X, rename_free(Y, apart)});
  rep.ubd_product = ubd(product, prod);
  rep.union_law = rep.ubd_union == std::max(rep.ubd_x, rep.ubd_y);
  if (!satisfiable(X) || !satisfiable(Y))
    rep.product_law = !satisfiable(product);
  else
    rep.product_law = rep.ubd_product == rep.ubd_x + rep.ubd_y;
  return rep;
}

}  // namespace presburger
