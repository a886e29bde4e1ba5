// Brute-force evaluation of quantified formulas on machine integers.
//
// Quantifiers are evaluated by scanning: a quantifier whose body is a
// conjunction carrying unit-coefficient lower and upper bounds on the bound
// variable scans exactly that range; a quantifier with a quantifier-free body
// scans the window beyond which every comparison atom is constant and every
// divisibility atom periodic. Anything else is rejected. No part of the
// elimination engine is used.
#pragma once

#include "presburger/formula.hpp"

#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace presburger::oracle {

class BruteForce {
 public:
  BruteForce(const Formula& f, const std::vector<std::string>& free) {
    for (const auto& v : free) slot(v);
    root_ = compile(f);
  }

  bool operator()(const std::vector<std::int64_t>& point) {
    env_.assign(slots_.size(), 0);
    for (std::size_t i = 0; i < point.size(); ++i) env_[i] = point[i];
    return run(root_);
  }

 private:
  struct Lin {
    std::vector<std::pair<std::size_t, std::int64_t>> coeffs;
    std::int64_t constant = 0;
    std::int64_t value(const std::vector<std::int64_t>& env) const {
      std::int64_t acc = constant;
      for (const auto& [i, c] : coeffs) acc += c * env[i];
      return acc;
    }
  };
  struct Node {
    Kind kind = Kind::True;
    AtomKind atom_kind = AtomKind::Gt;
    std::int64_t modulus = 1;
    Lin term;
    std::vector<std::size_t> kids;
    std::size_t var = 0;
    // quantifier scan data
    bool guarded = false;
    std::vector<Lin> lows, highs;  // y >= low, y <= high
    std::vector<std::pair<std::int64_t, Lin>> window_atoms;  // (coeff of y, rest)
    std::int64_t period = 1;
  };

  std::size_t slot(const std::string& v) {
    auto [it, ins] = slots_.try_emplace(v, slots_.size());
    return it->second;
  }

  Lin lin(const LinearTerm& t) {
    Lin l;
    l.constant = t.constant().get_si();
    for (const auto& [v, c] : t.coeffs()) l.coeffs.emplace_back(slot(v), c.get_si());
    return l;
  }

  std::size_t compile(const Formula& f) {
    Node n;
    n.kind = f.kind();
    switch (f.kind()) {
      case Kind::Atom:
        n.atom_kind = f.atom().kind;
        n.modulus = f.atom().modulus.get_si();
        n.term = lin(f.atom().term);
        break;
      case Kind::Forall: {
        // forall y. B  ==  not exists y. not B
        Formula ex = Formula::exists(f.var(), negate(f.body()));
        Node m;
        m.kind = Kind::Not;
        m.kids.push_back(compile(ex));
        nodes_.push_back(std::move(m));
        return nodes_.size() - 1;
      }
      case Kind::Exists: {
        n.var = slot(f.var());
        const Formula& body = f.body();
        std::vector<Formula> conj = body.kind() == Kind::And ? body.kids() : std::vector<Formula>{body};
        for (const auto& k : conj) {
          if (!k.is_atom() || k.atom().kind != AtomKind::Gt) continue;
          const LinearTerm& t = k.atom().term;
          Int c = t.coeff(f.var());
          if (c != 1 && c != -1) continue;
          LinearTerm rest = t.without(f.var());
          if (c == 1) {
            n.lows.push_back(lin(-rest + LinearTerm(1)));  // y + r > 0 => y >= 1 - r
          } else {
            n.highs.push_back(lin(rest - LinearTerm(1)));  // -y + r > 0 => y <= r - 1
          }
        }
        n.guarded = !n.lows.empty() && !n.highs.empty();
        if (!n.guarded) {
          if (!is_quantifier_free(body)) throw std::invalid_argument("brute force: unbounded nested quantifier");
          std::vector<const Atom*> atoms;
          collect(body, atoms);
          for (const Atom* a : atoms) {
            Int c = a->term.coeff(f.var());
            if (c == 0) continue;
            if (a->kind == AtomKind::Div) {
              n.period = std::lcm(n.period, a->modulus.get_si());
            } else {
              n.window_atoms.emplace_back(c.get_si(), lin(a->term.without(f.var())));
            }
          }
        }
        n.kids.push_back(compile(body));
        break;
      }
      default:
        for (const auto& k : f.kids()) n.kids.push_back(compile(k));
    }
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }

  static void collect(const Formula& f, std::vector<const Atom*>& out) {
    if (f.is_atom()) {
      out.push_back(&f.atom());
      return;
    }
    for (const auto& k : f.kids()) collect(k, out);
  }

  bool run(std::size_t id) {
    const Node& n = nodes_[id];
    switch (n.kind) {
      case Kind::True:
        return true;
      case Kind::False:
        return false;
      case Kind::Atom: {
        std::int64_t v = n.term.value(env_);
        switch (n.atom_kind) {
          case AtomKind::Eq:
            return v == 0;
          case AtomKind::Gt:
            return v > 0;
          case AtomKind::Div:
            return v % n.modulus == 0;
        }
        return false;
      }
      case Kind::Not:
        return !run(n.kids[0]);
      case Kind::And:
        for (auto k : n.kids)
          if (!run(k)) return false;
        return true;
      case Kind::Or:
        for (auto k : n.kids)
          if (run(k)) return true;
        return false;
      case Kind::Exists: {
        std::int64_t lo, hi;
        if (n.guarded) {
          lo = INT64_MIN;
          hi = INT64_MAX;
          for (const auto& l : n.lows) lo = std::max(lo, l.value(env_));
          for (const auto& h : n.highs) hi = std::min(hi, h.value(env_));
        } else {
          std::int64_t r = 0;
          for (const auto& [c, rest] : n.window_atoms) {
            std::int64_t v = rest.value(env_);
            r = std::max(r, (v < 0 ? -v : v) / (c < 0 ? -c : c) + 1);
          }
          lo = -r - n.period;
          hi = r + n.period;
        }
        std::int64_t saved = env_[n.var];
        bool found = false;
        for (std::int64_t y = lo; y <= hi && !found; ++y) {
          env_[n.var] = y;
          found = run(n.kids[0]);
        }
        env_[n.var] = saved;
        return found;
      }
      default:
        throw std::logic_error("brute force: unexpected node");
    }
  }

  std::map<std::string, std::size_t> slots_;
  std::vector<Node> nodes_;
  std::vector<std::int64_t> env_;
  std::size_t root_ = 0;
};

}  // namespace presburger::oracle
