// Seeded random extension-group specs for the group tests.
#pragma once

#include "presburger/zgroup.hpp"

#include <random>

namespace presburger::oracle {

// Standard scale, generators with random invertible standard parts plus an
// infinitesimal perturbation, and random twists.
inline ExtGroupSpec random_ext_spec(std::size_t r, std::size_t s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); };
  auto rational = [&](long bound) {
    Rat q(pick(-bound, bound), pick(1, 4));
    q.canonicalize();
    return q;
  };
  Scale scale = Scale::standard(s);
  RatMatrix m;
  do {
    m.assign(s, std::vector<Rat>(s));
    for (auto& row : m)
      for (auto& c : row) c = rational(5);
  } while (!detail::inverse(m));
  std::vector<ModelTuple> b;
  for (std::size_t i = 0; i < s; ++i) {
    std::vector<Rat> col;
    for (std::size_t j = 0; j < s; ++j) col.push_back(m[j][i]);
    ModelTuple bi = lift(col, scale);
    for (std::size_t j = 0; j < s; ++j) {
      std::vector<Rat> inf(s, Rat(0));
      for (std::size_t l = scale.a[j].leading_level() + 1; l < s; ++l) inf[l] = rational(50);
      bi[j] += NonstdInt(std::move(inf), Int(pick(-1000, 1000)));
    }
    b.push_back(std::move(bi));
  }
  std::vector<ModelTuple> v;
  for (std::size_t i = 0; i < s; ++i) {
    ModelTuple vi;
    for (std::size_t k = 0; k < r; ++k) {
      std::vector<Rat> inf(s);
      for (auto& q : inf) q = pick(0, 1) ? rational(20) : Rat(0);
      vi.emplace_back(std::move(inf), Int(pick(-100, 100)));
    }
    v.push_back(std::move(vi));
  }
  return ExtGroupSpec(r, LocalLattice(scale, b), v);
}

}  // namespace presburger::oracle
