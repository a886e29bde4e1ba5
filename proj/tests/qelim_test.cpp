#include "presburger/qelim.hpp"
#include "presburger/syntax.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

#include <gtest/gtest.h>

using namespace presburger;

TEST(Eliminate, Evenness) {
  Formula r = eliminate(parse("exists y. x = 2*y"));
  EXPECT_EQ(r, Formula::divides(2, LinearTerm::var("x")));
  EXPECT_EQ(to_string(r), "2 | x");
}

TEST(Eliminate, SuccessorAlwaysExists) {
  EXPECT_TRUE(eliminate(parse("exists y. (x < y and y < x + 2)")).is_true());
}

TEST(Eliminate, StrictInterval) {
  // exists y. 0 < y < x  <=>  x >= 2
  Formula r = eliminate(parse("exists y. 0 < y and y < x"));
  EXPECT_EQ(r, Formula::gt(LinearTerm::var("x") - LinearTerm(1)));
}

TEST(Eliminate, ResultIsQuantifierFree) {
  Formula r = eliminate(parse("forall z. exists y. (z < y and 3 | y + x) or x > 5"));
  EXPECT_TRUE(is_quantifier_free(r));
  EXPECT_TRUE(free_vars(r).empty());
  EXPECT_TRUE(r.is_true());
}

TEST(Eliminate, UsesEqualityWithCoefficient) {
  // exists y. 3y = x + 1 and y > 0  <=>  3 | x + 1 and x >= 2
  Formula f = parse("exists y. 3*y = x + 1 and y > 0");
  Formula r = eliminate(f);
  oracle::BruteForce oracle(f, {"x"});
  for (long x = -20; x <= 20; ++x) EXPECT_EQ(eval(r, Assignment<Int>{{"x", Int(x)}}), oracle({x})) << x;
}

TEST(Decide, Sentences) {
  EXPECT_TRUE(decide(parse("forall x. exists y. (x = 2*y or x = 2*y + 1)")));
  EXPECT_FALSE(decide(parse("exists x. (x < 0 and x > 0)")));
  EXPECT_FALSE(decide(parse("forall x. exists y. x = 3*y")));
  EXPECT_TRUE(decide(parse("forall x. exists y. 0 <= x - 3*y < 3")));
  EXPECT_TRUE(decide(parse("exists x. forall y. (y > x or 2*y <= 2*x)")));
}

TEST(Decide, RejectsFreeVariables) {
  EXPECT_THROW(decide(parse("x > 0")), std::invalid_argument);
}

TEST(Dnf, Distribution) {
  auto d = dnf(parse("x > 0 or (y > 0 and (z > 0 or w > 0))"));
  ASSERT_EQ(d.size(), 3u);
  std::set<std::string> got;
  for (const auto& c : d) got.insert(to_string(to_formula(c)));
  EXPECT_EQ(got, (std::set<std::string>{"x > 0", "y > 0 and z > 0", "w > 0 and y > 0"}));
}

TEST(Dnf, DropsUnsatisfiable) {
  EXPECT_TRUE(dnf(Formula::conj({parse("x > 0"), parse("-x > 0")})).empty());
}

TEST(Dnf, ExpandsNegatedDivisibility) {
  auto d = dnf(parse("not 3 | x"));
  EXPECT_EQ(d.size(), 2u);
  for (const auto& c : d) {
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].kind, AtomKind::Div);
  }
}

TEST(Dnf, AgreesWithOracle) {
  auto d = dnf(eliminate(parse("exists y. 0 < y and y < x")));
  std::vector<Formula> parts;
  for (const auto& c : d) parts.push_back(to_formula(c));
  auto pts = enumerate(Formula::disj(parts), {{"x", -10, 10}});
  ASSERT_EQ(pts.size(), 9u);
  EXPECT_EQ(pts.front()[0], 2);
}

// --- properties -------------------------------------------------------------

namespace {

void check_against_oracle(const Formula& f, const std::vector<std::string>& vars, std::int64_t r) {
  Formula q = eliminate(f);
  ASSERT_TRUE(is_quantifier_free(q));
  for (const auto& v : free_vars(q)) ASSERT_TRUE(free_vars(f).count(v)) << v;
  oracle::BruteForce oracle(f, vars);
  CompiledFormula cq(q, vars);
  for_each_point(cube(vars, -r, r), [&](const std::vector<std::int64_t>& p) {
    ASSERT_EQ(cq(p), oracle(p)) << to_string(f) << "\neliminated: " << to_string(q);
  });
}

}  // namespace

TEST(Properties, SoundOverIntegers) {
  oracle::FormulaGen gen(31);
  for (int i = 0; i < 120; ++i) {
    auto vars = oracle::var_names(gen.uniform(1, 2));
    check_against_oracle(gen.quantified(vars, gen.uniform(1, 3)), vars, 10);
    if (HasFatalFailure()) return;
  }
}

// exists y. B and forall y. not B are complementary in every Z-group, and
// their eliminations take different branches (-infinity vs +infinity).
TEST(Properties, SoundOverNonstandardModel) {
  oracle::FormulaGen gen(32);
  std::mt19937_64 rng(32);
  for (int i = 0; i < 100; ++i) {
    Formula body = gen.qf({"x", "y"}, 2, "y");
    Formula ex = Formula::exists("y", body);
    Formula q = eliminate(ex);
    Formula dual = eliminate(Formula::forall("y", negate(body)));
    for (int t = 0; t < 20; ++t) {
      std::uniform_int_distribution<long> fin(-50, 50), num(-5, 5);
      NonstdInt x(std::vector<Rat>{Rat(num(rng), 1 + (t % 3))}, Int(fin(rng)));
      Assignment<NonstdInt> rho{{"x", x}};
      ASSERT_NE(eval(q, rho), eval(dual, rho)) << to_string(body);
    }
  }
}

// In M_1 the solution set in y of a body is a union of intervals whose
// endpoints lie within a standard distance of some -d*x/c (d, c the
// coefficients of x, y in an atom), plus congruence conditions. Scanning
// finite offsets around those centres and two points beyond every centre
// finds a witness whenever one exists.
TEST(Properties, WitnessesInNonstandardModel) {
  oracle::FormulaGen gen(33);
  std::mt19937_64 rng(33);
  for (int i = 0; i < 60; ++i) {
    Formula body = gen.qf({"x", "y"}, 1, "y");
    Formula q = eliminate(Formula::exists("y", body));
    std::vector<Atom> atoms;
    detail::collect_atoms(body, atoms);
    for (int t = 0; t < 10; ++t) {
      std::uniform_int_distribution<long> fin(-30, 30), num(-6, 6);
      NonstdInt x(std::vector<Rat>{Rat(num(rng))}, Int(fin(rng)));
      std::set<Rat> centres{Rat(0), Rat(-1000), Rat(1000)};
      for (const auto& a : atoms) {
        Int c = a.term.coeff("y");
        if (c != 0) centres.insert(-Rat(a.term.coeff("x")) * x.infinite()[0] / Rat(c));
      }
      bool found = false;
      for (const auto& centre : centres)
        for (long m = -200; m <= 200 && !found; ++m)
          found = eval(body, Assignment<NonstdInt>{{"x", x}, {"y", NonstdInt(std::vector<Rat>{centre}, Int(m))}});
      ASSERT_EQ(eval(q, Assignment<NonstdInt>{{"x", x}}), found) << to_string(body) << " at " << x.to_string();
    }
  }
}

TEST(Properties, DnfEquivalentAndSatisfiable) {
  oracle::FormulaGen gen(34);
  for (int i = 0; i < 80; ++i) {
    auto vars = oracle::var_names(2);
    Formula f = gen.qf(vars);
    auto d = dnf(f);
    std::vector<Formula> parts;
    for (const auto& c : d) {
      Formula p = to_formula(c);
      ASSERT_TRUE(satisfiable(p));
      parts.push_back(p);
    }
    Box box = cube(vars, -8, 8);
    ASSERT_EQ(enumerate(Formula::disj(parts), box), enumerate(f, box)) << to_string(f);
  }
}

TEST(Properties, DecideMatchesBruteForceOnBoundedSentences) {
  oracle::FormulaGen gen(35);
  for (int i = 0; i < 100; ++i) {
    Formula f = gen.quantified({"x"}, gen.uniform(1, 2));
    // Bound the outer variable so the sentence is decidable by scanning.
    Formula s = Formula::exists("x", Formula::conj({parse("x >= -12"), parse("x <= 12"), f}));
    oracle::BruteForce oracle(s, {});
    ASSERT_EQ(decide(s), oracle({})) << to_string(s);
  }
}
