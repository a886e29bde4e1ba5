// Exact integer and rational arithmetic helpers on top of GMP.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace presburger {

using Int = mpz_class;
using Rat = mpq_class;

/// Floor division, b > 0.
inline Int floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

/// Least non-negative residue of a modulo b, b > 0.
inline Int mod(const Int& a, const Int& b) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Int gcd(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline Int lcm(const Int& a, const Int& b) {
  Int l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

inline bool divides(const Int& n, const Int& a) {
  return mpz_divisible_p(a.get_mpz_t(), n.get_mpz_t()) != 0;
}

inline Int floor(const Rat& q) { return floor_div(q.get_num(), q.get_den()); }

inline Int ceil(const Rat& q) { return -floor_div(-q.get_num(), q.get_den()); }

inline bool is_integer(const Rat& q) { return q.get_den() == 1; }

inline bool fits_int64(const Int& a) { return a.fits_slong_p() != 0; }

inline std::int64_t to_int64(const Int& a) {
  if (!fits_int64(a)) throw std::overflow_error("integer does not fit in 64 bits");
  return a.get_si();
}

inline std::string to_string(const Int& a) { return a.get_str(); }

/// Prints `p` or `p/q`.
inline std::string to_string(const Rat& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Int parse_int(std::string_view text) {
  Int v;
  std::string s(text);
  if (!s.empty() && s[0] == '+') s.erase(0, 1);
  if (s.empty() || v.set_str(s, 10) != 0) throw std::invalid_argument("bad integer literal: " + std::string(text));
  return v;
}

/// Accepts `p` or `p/q`.
inline Rat parse_rat(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rat(parse_int(text));
  Int den = parse_int(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
  Rat q(parse_int(text.substr(0, slash)), den);
  q.canonicalize();
  return q;
}

}  // namespace presburger
