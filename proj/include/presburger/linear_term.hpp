// Integer linear terms  c_1*x_1 + ... + c_n*x_n + c_0  in canonical form.
#pragma once

#include "presburger/arith.hpp"

#include <compare>
#include <map>
#include <set>
#include <string>
#include <utility>

namespace presburger {

/// Canonical integer linear term. No variable ever maps to a zero
/// coefficient, so structural equality is semantic equality.
class LinearTerm {
 public:
  using Coeffs = std::map<std::string, Int>;

  LinearTerm() = default;
  explicit LinearTerm(Int constant) : constant_(std::move(constant)) {}
  LinearTerm(long constant) : constant_(constant) {}  // NOLINT: literals are terms

  static LinearTerm var(const std::string& name, const Int& coeff = 1) {
    LinearTerm t;
    if (coeff != 0) t.coeffs_.emplace(name, coeff);
    return t;
  }

  const Coeffs& coeffs() const { return coeffs_; }
  const Int& constant() const { return constant_; }

  Int coeff(const std::string& name) const {
    auto it = coeffs_.find(name);
    return it == coeffs_.end() ? Int(0) : it->second;
  }

  bool has(const std::string& name) const { return coeffs_.count(name) != 0; }
  bool is_constant() const { return coeffs_.empty(); }

  std::set<std::string> vars() const {
    std::set<std::string> out;
    for (const auto& [v, c] : coeffs_) out.insert(v);
    return out;
  }

  /// Term with the variable dropped (its coefficient set to zero).
  LinearTerm without(const std::string& name) const {
    LinearTerm t = *this;
    t.coeffs_.erase(name);
    return t;
  }

  LinearTerm without_constant() const {
    LinearTerm t = *this;
    t.constant_ = 0;
    return t;
  }

  /// gcd of the variable coefficients (0 for a constant term).
  Int content() const {
    Int g = 0;
    for (const auto& [v, c] : coeffs_) g = gcd(g, c);
    return g;
  }

  LinearTerm& operator+=(const LinearTerm& o) {
    for (const auto& [v, c] : o.coeffs_) add_coeff(v, c);
    constant_ += o.constant_;
    return *this;
  }
  LinearTerm& operator-=(const LinearTerm& o) {
    for (const auto& [v, c] : o.coeffs_) add_coeff(v, -c);
    constant_ -= o.constant_;
    return *this;
  }
  LinearTerm& operator*=(const Int& k) {
    if (k == 0) {
      coeffs_.clear();
      constant_ = 0;
      return *this;
    }
    for (auto& [v, c] : coeffs_) c *= k;
    constant_ *= k;
    return *this;
  }

  friend LinearTerm operator+(LinearTerm a, const LinearTerm& b) { return a += b; }
  friend LinearTerm operator-(LinearTerm a, const LinearTerm& b) { return a -= b; }
  friend LinearTerm operator*(LinearTerm a, const Int& k) { return a *= k; }
  friend LinearTerm operator*(const Int& k, LinearTerm a) { return a *= k; }
  friend LinearTerm operator-(LinearTerm a) { return a *= Int(-1); }

  /// Replace `name` by `t`.
  LinearTerm substitute(const std::string& name, const LinearTerm& t) const {
    auto it = coeffs_.find(name);
    if (it == coeffs_.end()) return *this;
    Int c = it->second;
    LinearTerm out = without(name);
    out += t * c;
    return out;
  }

  /// Evaluate with `lookup(name)` returning a model value V. V must support
  /// V + V and Int * V, and be constructible from Int.
  template <class V, class Lookup>
  V evaluate(Lookup&& lookup) const {
    V acc = V(constant_);
    for (const auto& [v, c] : coeffs_) acc = acc + c * lookup(v);
    return acc;
  }

  friend bool operator==(const LinearTerm& a, const LinearTerm& b) {
    return a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_;
  }

  friend int compare(const LinearTerm& a, const LinearTerm& b) {
    auto ia = a.coeffs_.begin();
    auto ib = b.coeffs_.begin();
    for (; ia != a.coeffs_.end() && ib != b.coeffs_.end(); ++ia, ++ib) {
      if (ia->first != ib->first) return ia->first < ib->first ? -1 : 1;
      int c = cmp(ia->second, ib->second);
      if (c != 0) return c < 0 ? -1 : 1;
    }
    if (ia != a.coeffs_.end()) return 1;
    if (ib != b.coeffs_.end()) return -1;
    int c = cmp(a.constant_, b.constant_);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }

  friend bool operator<(const LinearTerm& a, const LinearTerm& b) { return compare(a, b) < 0; }

  /// Deterministic text, e.g. `x - 2*y + 3`.
  std::string to_string() const {
    std::string out;
    bool first = true;
    for (const auto& [v, c] : coeffs_) {
      Int a = abs(c);
      if (first) {
        if (c < 0) out += "-";
      } else {
        out += c < 0 ? " - " : " + ";
      }
      if (a != 1) out += a.get_str() + "*";
      out += v;
      first = false;
    }
    if (first) return constant_.get_str();
    if (constant_ != 0) {
      out += constant_ < 0 ? " - " : " + ";
      out += Int(abs(constant_)).get_str();
    }
    return out;
  }

 private:
  void add_coeff(const std::string& v, const Int& c) {
    auto [it, inserted] = coeffs_.try_emplace(v, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) coeffs_.erase(it);
    } else if (c == 0) {
      coeffs_.erase(it);
    }
  }

  Coeffs coeffs_;
  Int constant_ = 0;
};

}  // namespace presburger
