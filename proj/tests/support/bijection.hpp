// Pointwise check of a parameter-free normal form on boxes: every source
// point maps into X, no two sources share an image, and every point of X in
// a small target box is hit.
#pragma once

#include "presburger/ubd.hpp"

#include <cmath>
#include <set>
#include <string>

namespace presburger::oracle {

struct PointwiseResult {
  bool ok = true;
  std::string message;
  std::size_t sources = 0;
  std::size_t targets = 0;
};

inline PointwiseResult pointwise_bijection(const NormalForm& nf, const Formula& X, std::int64_t half,
                                           std::size_t budget = 100'000) {
  PointwiseResult res;
  auto fail = [&](std::string m) {
    res.ok = false;
    res.message = std::move(m);
    return res;
  };
  // Sources are enumerated per piece in the class n_1 = P*u + p, so every
  // piece gets the same share of the budget however large P is.
  std::size_t dims = nf.coords.size();
  std::size_t P = nf.pieces.size();
  bool unfold = nf.r > 0 && P > 1;
  std::size_t share = budget / std::max<std::size_t>(P, 1);
  auto side = static_cast<std::int64_t>(std::floor(std::pow(double(share), 1.0 / double(std::max<std::size_t>(nf.r, 1)))));
  side = std::max<std::int64_t>(side, 4);
  Box src;
  std::vector<std::string> names = nf.coords;
  if (unfold) names[0] = fresh_name("u", all_vars(nf.source()));
  for (std::size_t i = 0; i < dims; ++i) {
    std::int64_t hi = side - 1;
    if (i >= nf.r) {
      const AffineForm& b = nf.bounds[i - nf.r];
      if (!b.is_constant()) return fail("pointwise check needs constant bounds");
      hi = floor(b.constant()).get_si() - 1;
    }
    src.push_back({names[i], 0, hi});
  }
  Formula x = eliminate(X);
  CompiledFormula in_x(x, nf.vars);
  std::set<std::vector<std::int64_t>> image;
  for (std::size_t p = 0; p < P; ++p) {
    Formula dom = nf.pieces[p].domain;
    if (unfold) dom = substitute(dom, nf.coords[0], LinearTerm::var(names[0], Int(P)) + LinearTerm(Int(p)));
    for (const auto& s : enumerate(dom, src, budget * 64)) {
      ++res.sources;
      std::map<std::string, Int> point;
      for (std::size_t i = 0; i < dims; ++i) point[nf.coords[i]] = Int(static_cast<long>(s[i]));
      if (unfold) point[nf.coords[0]] = Int(static_cast<long>(s[0] * std::int64_t(P) + std::int64_t(p)));
      auto t = map_point(nf, point);
      if (!t) return fail("source point has no image");
      std::vector<std::int64_t> v;
      for (const auto& c : *t) v.push_back(c.get_si());
      if (!in_x(v)) return fail("image point lies outside X");
      if (!image.insert(v).second) return fail("two source points share an image");
    }
  }
  for (const auto& p : enumerate(x, cube(nf.vars, -half, half))) {
    ++res.targets;
    if (!image.count(p)) return fail("point of X is not hit from the source box");
  }
  return res;
}

}  // namespace presburger::oracle
