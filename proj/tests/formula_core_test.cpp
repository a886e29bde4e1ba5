#include "presburger/normalize.hpp"
#include "presburger/semantics.hpp"
#include "presburger/syntax.hpp"
#include "support/generators.hpp"

#include <gtest/gtest.h>

using namespace presburger;

namespace {

LinearTerm v(const char* name, long c = 1) { return LinearTerm::var(name, c); }

}  // namespace

TEST(LinearTerm, DropsZeroCoefficients) {
  LinearTerm t = v("x") + v("y", 2) - v("x");
  EXPECT_FALSE(t.has("x"));
  EXPECT_EQ(t.coeff("y"), 2);
  EXPECT_EQ(t, v("y", 2));
}

TEST(LinearTerm, PrintsCanonically) {
  EXPECT_EQ((v("x") - v("y", 2) + LinearTerm(3)).to_string(), "x - 2*y + 3");
  EXPECT_EQ((-v("x")).to_string(), "-x");
  EXPECT_EQ(LinearTerm(0).to_string(), "0");
}

TEST(Parse, ExistsDesugarsToEquation) {
  Formula f = parse("exists y. x = 2*y");
  ASSERT_EQ(f.kind(), Kind::Exists);
  EXPECT_EQ(f.var(), "y");
  ASSERT_TRUE(f.body().is_atom());
  EXPECT_EQ(f.body().atom().kind, AtomKind::Eq);
  EXPECT_EQ(f.body().atom().term, v("x") - v("y", 2));
}

TEST(Parse, ComparisonsUseDiscreteOrder) {
  Formula f = parse("x >= 0 and x < 5");
  EXPECT_EQ(f, Formula::conj({Formula::gt(v("x") + LinearTerm(1)), Formula::gt(LinearTerm(5) - v("x"))}));
}

TEST(Parse, ChainedRelations) {
  EXPECT_EQ(parse("0 <= x < 5"), parse("0 <= x and x < 5"));
}

TEST(Parse, DivisibilityAndNegatedEquality) {
  Formula f = parse("3 | x - 1 or x != 2");
  ASSERT_EQ(f.kind(), Kind::Or);
  EXPECT_EQ(f.kids()[0], Formula::divides(3, v("x") - LinearTerm(1)));
  EXPECT_EQ(f.kids()[1], Formula::neg(Formula::eq(v("x") - LinearTerm(2))));
}

TEST(Parse, RejectsNonLinearProduct) {
  EXPECT_THROW(parse("x*y = 1"), NonLinearError);
}

TEST(Parse, ReportsPosition) {
  try {
    parse("x >\n  and y");
    FAIL() << "expected a parse error";
  } catch (const NonLinearError&) {
    FAIL() << "wrong error kind";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 3u);
  }
}

TEST(Parse, RenamesShadowedBinders) {
  Formula f = parse("exists x. x > 0 and exists x. x < 0");
  std::set<std::string> binders;
  std::function<void(const Formula&)> walk = [&](const Formula& g) {
    if (g.is_quantifier()) {
      EXPECT_TRUE(binders.insert(g.var()).second);
    }
    for (const auto& k : g.kids()) walk(k);
  };
  walk(f);
  EXPECT_EQ(binders.size(), 2u);
}

TEST(Parse, BoundNameClashingWithFreeIsRenamed) {
  Formula f = parse("x > 0 and exists x. x < 0");
  EXPECT_EQ(free_vars(f), std::set<std::string>{"x"});
  EXPECT_NE(f.kids()[1].var(), "x");
}

TEST(Substitute, Constant) {
  Formula f = Formula::eq(v("x") - v("y", 2));
  EXPECT_EQ(substitute(f, "x", LinearTerm(4)), Formula::eq(LinearTerm(4) - v("y", 2)));
}

TEST(Substitute, AvoidsCapture) {
  Formula f = Formula::exists("y", Formula::eq(v("x") - v("y")));
  Formula g = substitute(f, "x", v("y") + LinearTerm(1));
  ASSERT_EQ(g.kind(), Kind::Exists);
  EXPECT_NE(g.var(), "y");
  EXPECT_EQ(g.body(), Formula::eq(v("y") + LinearTerm(1) - v(g.var().c_str())));
  EXPECT_EQ(free_vars(g), std::set<std::string>{"y"});
}

TEST(Substitute, NonFreeVariableIsIdentity) {
  Formula f = Formula::gt(v("x"));
  EXPECT_EQ(substitute(f, "z", v("w")), f);
}

TEST(Normalize, NegatedComparison) {
  Formula t = Formula::gt(v("x") - LinearTerm(2));
  EXPECT_EQ(normalize(Formula::neg(t)), Formula::gt(LinearTerm(3) - v("x")));
}

TEST(Normalize, ConstantAtomsFold) {
  EXPECT_TRUE(normalize(Formula::gt(LinearTerm(3))).is_true());
  EXPECT_TRUE(normalize(Formula::eq(LinearTerm(1))).is_false());
}

TEST(Normalize, DivisibilityGcdReduction) {
  EXPECT_TRUE(normalize(Formula::divides(2, v("x", 2) + LinearTerm(4))).is_true());
  EXPECT_EQ(normalize(Formula::divides(4, v("x", 2) + LinearTerm(2))), Formula::divides(2, v("x") + LinearTerm(1)));
  EXPECT_TRUE(normalize(Formula::divides(4, v("x", 2) + LinearTerm(1))).is_false());
}

TEST(Normalize, ComparisonGcdReduction) {
  // 2x - 3 > 0  <=>  x > 3/2  <=>  x - 1 > 0
  EXPECT_EQ(normalize(Formula::gt(v("x", 2) - LinearTerm(3))), Formula::gt(v("x") - LinearTerm(1)));
  EXPECT_TRUE(normalize(Formula::eq(v("x", 2) - LinearTerm(3))).is_false());
}

TEST(Normalize, ContradictoryBounds) {
  EXPECT_TRUE(normalize(parse("x > 0 and x < 1")).is_false());
  EXPECT_EQ(normalize(parse("x > 0 and x < 2")), Formula::eq(v("x") - LinearTerm(1)));
  EXPECT_TRUE(normalize(parse("x > 0 or x < 1")).is_true());
}

TEST(Printer, RoundTripsExamples) {
  for (const char* text : {"exists y. x = 2*y", "forall x. exists y. (x = 2*y or x = 2*y + 1)", "not (3 | x + 1) and y > 0",
                           "x > 0 or (y < 0 and z = 1)", "exists u. (forall w. w > u or w <= u)"}) {
    Formula f = parse(text);
    EXPECT_TRUE(alpha_equivalent(parse(to_string(f)), f)) << text << " printed as " << to_string(f);
  }
}

// --- properties -------------------------------------------------------------

TEST(Properties, PrintParseRoundTrip) {
  oracle::FormulaGen gen(11);
  for (int i = 0; i < 300; ++i) {
    Formula f = gen.quantified(oracle::var_names(gen.uniform(1, 3)), gen.uniform(0, 3));
    std::string text = to_string(f);
    Formula g = parse(text);
    ASSERT_TRUE(alpha_equivalent(g, f)) << text << "\nreparsed: " << to_string(g);
    ASSERT_EQ(free_vars(g), free_vars(f));
    ASSERT_EQ(to_string(g), to_string(parse(to_string(g))));
  }
}

TEST(Properties, NormalizeIsIdempotent) {
  oracle::FormulaGen gen(12);
  for (int i = 0; i < 300; ++i) {
    Formula f = gen.quantified(oracle::var_names(gen.uniform(1, 3)), gen.uniform(0, 2));
    Formula n = normalize(f);
    ASSERT_EQ(normalize(n), n) << to_string(f);
  }
}

TEST(Properties, NormalizePreservesTruth) {
  oracle::FormulaGen gen(13);
  for (int i = 0; i < 200; ++i) {
    auto vars = oracle::var_names(gen.uniform(1, 3));
    Formula f = gen.qf(vars);
    Formula n = normalize(f);
    Box box = cube(vars, -6, 6);
    ASSERT_EQ(enumerate(f, box), enumerate(n, box)) << to_string(f) << "\nnormalized: " << to_string(n);
  }
}

TEST(Properties, SubstitutionCommutesWithEvaluation) {
  oracle::FormulaGen gen(14);
  for (int i = 0; i < 200; ++i) {
    Formula f = gen.qf({"x", "y"});
    LinearTerm t = v("y", gen.uniform(-3, 3)) + LinearTerm(gen.uniform(-4, 4));
    Formula g = substitute(f, "x", t);
    for (long y = -5; y <= 5; ++y) {
      Int xv = t.evaluate<Int>([&](const std::string&) { return Int(y); });
      Assignment<Int> lhs{{"y", Int(y)}};
      Assignment<Int> rhs{{"x", xv}, {"y", Int(y)}};
      ASSERT_EQ(eval(g, lhs), eval(f, rhs)) << to_string(f);
    }
  }
}
