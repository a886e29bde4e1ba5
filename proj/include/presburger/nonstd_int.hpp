// The computable Z-group M_s = Q^s x Z, ordered lexicographically.
#pragma once

#include "presburger/arith.hpp"

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace presburger {

/// Element of M_s. `infinite()[0]` is the most significant level; the
/// finite part is the standard integer coordinate.
class NonstdInt {
 public:
  NonstdInt() = default;
  explicit NonstdInt(std::size_t levels) : inf_(levels) {}
  NonstdInt(std::size_t levels, Int finite) : inf_(levels), fin_(std::move(finite)) {}
  NonstdInt(std::vector<Rat> infinite, Int finite) : inf_(std::move(infinite)), fin_(std::move(finite)) {}

  /// The unit of infinite level `level` (0 = most significant).
  static NonstdInt unit(std::size_t levels, std::size_t level) {
    NonstdInt x(levels);
    x.inf_.at(level) = 1;
    return x;
  }

  std::size_t levels() const { return inf_.size(); }
  const std::vector<Rat>& infinite() const { return inf_; }
  const Int& finite() const { return fin_; }

  /// Index of the most significant non-zero infinite level, or `levels()`
  /// when the element is standard.
  std::size_t leading_level() const {
    for (std::size_t i = 0; i < inf_.size(); ++i)
      if (inf_[i] != 0) return i;
    return inf_.size();
  }
  bool is_standard() const { return leading_level() == inf_.size(); }
  bool is_zero() const { return is_standard() && fin_ == 0; }
  int sign() const {
    for (const auto& q : inf_)
      if (q != 0) return sgn(q);
    return sgn(fin_);
  }

  NonstdInt& operator+=(const NonstdInt& o) {
    check(o);
    for (std::size_t i = 0; i < inf_.size(); ++i) inf_[i] += o.inf_[i];
    fin_ += o.fin_;
    return *this;
  }
  NonstdInt& operator-=(const NonstdInt& o) {
    check(o);
    for (std::size_t i = 0; i < inf_.size(); ++i) inf_[i] -= o.inf_[i];
    fin_ -= o.fin_;
    return *this;
  }
  friend NonstdInt operator+(NonstdInt a, const NonstdInt& b) { return a += b; }
  friend NonstdInt operator-(NonstdInt a, const NonstdInt& b) { return a -= b; }
  friend NonstdInt operator-(NonstdInt a) {
    for (auto& q : a.inf_) q = -q;
    a.fin_ = -a.fin_;
    return a;
  }
  friend NonstdInt operator*(const Int& k, NonstdInt a) {
    for (auto& q : a.inf_) q *= k;
    a.fin_ *= k;
    return a;
  }
  NonstdInt operator+(const Int& k) const {
    NonstdInt r = *this;
    r.fin_ += k;
    return r;
  }

  /// Euclidean division: x = n*q + r with 0 <= r < n.
  std::pair<NonstdInt, Int> divmod(const Int& n) const {
    if (n < 1) throw std::invalid_argument("divisor must be positive");
    NonstdInt q(levels());
    for (std::size_t i = 0; i < inf_.size(); ++i) q.inf_[i] = inf_[i] / n;
    q.fin_ = floor_div(fin_, n);
    return {q, mod(fin_, n)};
  }
  bool divisible_by(const Int& n) const { return divides(n, fin_); }

  friend bool operator==(const NonstdInt& a, const NonstdInt& b) { return a.inf_ == b.inf_ && a.fin_ == b.fin_; }
  friend std::strong_ordering operator<=>(const NonstdInt& a, const NonstdInt& b) {
    a.check(b);
    for (std::size_t i = 0; i < a.inf_.size(); ++i) {
      int c = cmp(a.inf_[i], b.inf_[i]);
      if (c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    int c = cmp(a.fin_, b.fin_);
    return c < 0 ? std::strong_ordering::less : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  /// `(q1,...,qs;m)`
  std::string to_string() const { return "(" + literal() + ")"; }

  /// `q1,...,qs;m` (the command-line literal form).
  std::string literal() const {
    std::string out;
    for (std::size_t i = 0; i < inf_.size(); ++i) {
      if (i) out += ",";
      out += presburger::to_string(inf_[i]);
    }
    return out + ";" + fin_.get_str();
  }

  /// Parses `q1,...,qs;m`, optionally parenthesized. A plain integer `m`
  /// is the standard element of M_levels.
  static NonstdInt parse(std::string_view text, std::size_t levels) {
    std::string s;
    for (char c : text)
      if (c != ' ' && c != '(' && c != ')') s += c;
    auto semi = s.find(';');
    if (semi == std::string::npos) return NonstdInt(levels, parse_int(s));
    std::vector<Rat> inf;
    std::string head = s.substr(0, semi);
    std::size_t start = 0;
    while (!head.empty() && start <= head.size()) {
      auto comma = head.find(',', start);
      if (comma == std::string::npos) comma = head.size();
      inf.push_back(parse_rat(head.substr(start, comma - start)));
      start = comma + 1;
    }
    if (inf.size() != levels)
      throw std::invalid_argument("expected " + std::to_string(levels) + " infinite parts in '" + std::string(text) + "'");
    return NonstdInt(std::move(inf), parse_int(s.substr(semi + 1)));
  }

 private:
  void check(const NonstdInt& o) const {
    if (o.inf_.size() != inf_.size()) throw std::invalid_argument("elements of different models");
  }

  std::vector<Rat> inf_;
  Int fin_ = 0;
};

}  // namespace presburger
