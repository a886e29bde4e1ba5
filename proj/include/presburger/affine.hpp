// Affine functions with rational coefficients.
#pragma once

#include "presburger/linear_term.hpp"
#include "presburger/semantics.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace presburger {

/// sum_i coeff_i * var_i + constant, with rational coefficients. Variables
/// designated as parameters play the role of the definable constants.
class AffineForm {
 public:
  using Coeffs = std::map<std::string, Rat>;

  AffineForm() = default;
  AffineForm(Rat constant) : constant_(std::move(constant)) { constant_.canonicalize(); }
  AffineForm(const LinearTerm& t, const Int& den = 1) {
    for (const auto& [v, c] : t.coeffs()) set(v, Rat(c, den));
    constant_ = Rat(t.constant(), den);
    constant_.canonicalize();
  }

  static AffineForm var(const std::string& name, const Rat& coeff = 1) {
    AffineForm f;
    f.set(name, coeff);
    return f;
  }

  const Coeffs& coeffs() const { return coeffs_; }
  const Rat& constant() const { return constant_; }
  Rat coeff(const std::string& v) const {
    auto it = coeffs_.find(v);
    return it == coeffs_.end() ? Rat(0) : it->second;
  }
  bool is_constant() const { return coeffs_.empty(); }

  AffineForm& operator+=(const AffineForm& o) {
    for (const auto& [v, c] : o.coeffs_) set(v, coeff(v) + c);
    constant_ += o.constant_;
    return *this;
  }
  AffineForm& operator-=(const AffineForm& o) { return *this += -o; }
  friend AffineForm operator+(AffineForm a, const AffineForm& b) { return a += b; }
  friend AffineForm operator-(AffineForm a, const AffineForm& b) { return a -= b; }
  friend AffineForm operator-(const AffineForm& a) { return a * Rat(-1); }
  friend AffineForm operator*(const AffineForm& a, const Rat& k) {
    AffineForm out;
    if (k == 0) return out;
    for (const auto& [v, c] : a.coeffs_) out.coeffs_[v] = c * k;
    out.constant_ = a.constant_ * k;
    return out;
  }

  /// Replace `name` by the affine form `t`.
  AffineForm substitute(const std::string& name, const AffineForm& t) const {
    Rat c = coeff(name);
    if (c == 0) return *this;
    AffineForm out = *this;
    out.coeffs_.erase(name);
    out += t * c;
    return out;
  }

  /// (numerator, denominator) with an integer numerator term and the least
  /// positive common denominator.
  std::pair<LinearTerm, Int> cleared() const {
    Int den = constant_.get_den();
    for (const auto& [v, c] : coeffs_) den = lcm(den, Int(c.get_den()));
    LinearTerm num(Int(constant_.get_num() * (den / constant_.get_den())));
    for (const auto& [v, c] : coeffs_) num += LinearTerm::var(v, c.get_num() * (den / c.get_den()));
    return {num, den};
  }

  Rat eval(const std::map<std::string, Int>& rho) const {
    Rat acc = constant_;
    for (const auto& [v, c] : coeffs_) {
      auto it = rho.find(v);
      if (it == rho.end()) throw EvalError("variable '" + v + "' is not assigned");
      acc += c * Rat(it->second);
    }
    acc.canonicalize();
    return acc;
  }

  /// Value in M_s; the caller guarantees integrality.
  NonstdInt eval(const std::map<std::string, NonstdInt>& rho, std::size_t levels) const {
    auto [num, den] = cleared();
    NonstdInt v = term_value(num, rho, levels);
    auto [q, r] = v.divmod(den);
    if (r != 0) throw EvalError("affine value is not integral");
    return q;
  }

  friend bool operator==(const AffineForm& a, const AffineForm& b) {
    return a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_;
  }
  friend bool operator<(const AffineForm& a, const AffineForm& b) { return a.to_string() < b.to_string(); }

  /// e.g. `1/2*x - y + 3/2`
  std::string to_string() const {
    std::string out;
    for (const auto& [v, c] : coeffs_) {
      Rat a = abs(c);
      if (out.empty()) {
        if (c < 0) out += "-";
      } else {
        out += c < 0 ? " - " : " + ";
      }
      if (a != 1) out += presburger::to_string(a) + "*";
      out += v;
    }
    if (out.empty()) return presburger::to_string(constant_);
    if (constant_ != 0) out += (constant_ < 0 ? " - " : " + ") + presburger::to_string(Rat(abs(constant_)));
    return out;
  }

 private:
  void set(const std::string& v, Rat c) {
    c.canonicalize();
    if (c == 0) {
      coeffs_.erase(v);
    } else {
      coeffs_[v] = std::move(c);
    }
  }

  Coeffs coeffs_;
  Rat constant_ = 0;
};

/// y > f  <=>  den*y - num > 0   (f = num/den)
inline Formula above(const LinearTerm& y, const AffineForm& f) {
  auto [num, den] = f.cleared();
  return Formula::gt(y * den - num);
}

/// y < g  <=>  num - den*y > 0
inline Formula below(const LinearTerm& y, const AffineForm& g) {
  auto [num, den] = g.cleared();
  return Formula::gt(num - y * den);
}

/// a > b, a >= b as integer atoms.
inline Formula greater(const AffineForm& a, const AffineForm& b) { return Formula::gt((a - b).cleared().first); }
inline Formula greater_eq(const AffineForm& a, const AffineForm& b) {
  return Formula::gt((a - b).cleared().first + LinearTerm(1));
}

/// N | f, for f integral where this is used.
inline Formula divides_form(const Int& n, const AffineForm& f) {
  auto [num, den] = f.cleared();
  return Formula::divides(n * den, num);
}

/// f takes integer values.
inline Formula integral(const AffineForm& f) {
  auto [num, den] = f.cleared();
  return Formula::divides(den, num);
}

/// y = f
inline Formula equals(const LinearTerm& y, const AffineForm& f) {
  auto [num, den] = f.cleared();
  return Formula::eq(y * den - num);
}

}  // namespace presburger
