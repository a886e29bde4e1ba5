#include "presburger/syntax.hpp"
#include "presburger/ubd.hpp"
#include "support/bijection.hpp"
#include "support/generators.hpp"

#include <gtest/gtest.h>

using namespace presburger;

namespace {

Formula lattice(std::size_t r) {
  std::vector<Formula> parts;
  for (const auto& v : oracle::var_names(r)) parts.push_back(Formula::eq(LinearTerm::var(v) - LinearTerm::var(v)));
  return Formula::conj(parts);
}

std::map<std::string, Int> at(const std::string& v, long n) { return {{v, Int(n)}}; }

}  // namespace

TEST(NormalForm, IntegersByParity) {
  NormalForm nf = normal_form(parse("x = x"), {"x"});
  EXPECT_EQ(nf.r, 1u);
  EXPECT_EQ(nf.s, 0u);
  for (long n = 0; n <= 40; ++n) {
    auto x = map_point(nf, at(nf.coords[0], n));
    ASSERT_TRUE(x);
    EXPECT_EQ((*x)[0], n % 2 == 0 ? Int(n / 2) : Int(-(n + 1) / 2)) << n;
  }
  EXPECT_TRUE(certify(nf, parse("x = x")).pass);
}

TEST(NormalForm, ParametricInterval) {
  Formula X = parse("0 <= x and x < b");
  NormalForm nf = normal_form(X, {"x"}, {"b"});
  EXPECT_EQ(nf.r, 0u);
  ASSERT_EQ(nf.s, 1u);
  EXPECT_EQ(nf.bounds[0], AffineForm::var("b"));
  ASSERT_EQ(nf.pieces.size(), 1u);
  EXPECT_EQ(nf.pieces[0].rule[0], AffineForm::var(nf.coords[0]));
  EXPECT_TRUE(certify(nf, X).pass);
}

TEST(NormalForm, TriangleHasRankTwo) {
  Formula X = parse("x >= 0 and 0 <= z and z < x");
  NormalForm nf = normal_form(X, {"x", "z"});
  EXPECT_EQ(nf.r, 2u);
  EXPECT_EQ(nf.s, 0u);
  EXPECT_TRUE(certify(nf, X).pass);
  auto res = oracle::pointwise_bijection(nf, X, 30, 120'000);
  EXPECT_TRUE(res.ok) << res.message;
  // Only the quadrant [0,30]^2 meets X in the target box.
  EXPECT_EQ(res.targets, 30u * 31u / 2u);
}

TEST(NormalForm, CertifyRejectsBrokenRules) {
  Formula X = parse("x >= 0 and 0 <= z and z < x");
  NormalForm nf = normal_form(X, {"x", "z"});
  NormalForm shifted = nf;
  shifted.pieces[0].rule[1] = shifted.pieces[0].rule[1] + AffineForm(Rat(1));
  EXPECT_FALSE(certify(shifted, X).pass);
  NormalForm halved = nf;
  halved.pieces[0].rule[0] = halved.pieces[0].rule[0] * Rat(1, 2);
  EXPECT_FALSE(certify(halved, X).pass);
}

TEST(NormalForm, EmptySetHasNoPieces) {
  NormalForm nf = normal_form(parse("x > 0 and x < 1"), {"x"});
  EXPECT_TRUE(nf.pieces.empty());
  EXPECT_EQ(nf.r, 0u);
}

TEST(Ubd, IntegerLattices) {
  for (std::size_t r = 0; r <= 3; ++r) {
    Formula X = lattice(r);
    NormalForm nf = normal_form(X, oracle::var_names(r));
    EXPECT_EQ(nf.r, r);
    EXPECT_TRUE(certify(nf, X).pass);
  }
}

TEST(Ubd, BoundedSets) {
  EXPECT_EQ(ubd(parse("0 <= x and x < 5"), {"x"}), 0u);
  EXPECT_TRUE(is_bounded(parse("0 <= x and x < 5"), {"x"}));
  EXPECT_FALSE(is_bounded(parse("x = x"), {"x"}));
  EXPECT_FALSE(is_bounded(parse("x + y = 0"), {"x", "y"}));
  EXPECT_EQ(ubd(parse("x + y = 0"), {"x", "y"}), 1u);
}

TEST(Ubd, LineTimesInterval) {
  EXPECT_EQ(ubd(parse("x = x and 0 <= y and y < 10"), {"x", "y"}), 1u);
}

TEST(Laws, EvensAndOdds) {
  LawsReport rep = product_union_laws(parse("2 | x"), {"x"}, parse("2 | y + 1"), {"y"});
  EXPECT_EQ(rep.ubd_union, 1u);
  EXPECT_EQ(rep.ubd_product, 2u);
  EXPECT_TRUE(rep.pass());
}

TEST(Laws, LineTimesInterval) {
  LawsReport rep = product_union_laws(parse("x = x"), {"x"}, parse("0 <= y and y < 3"), {"y"});
  EXPECT_EQ(rep.ubd_x, 1u);
  EXPECT_EQ(rep.ubd_y, 0u);
  EXPECT_EQ(rep.ubd_product, 1u);
  EXPECT_TRUE(rep.pass());
  EXPECT_THROW(product_union_laws(parse("x = x"), {"x"}, parse("y = z"), {"y", "z"}), std::invalid_argument);
}

// The product law needs nonempty factors; an empty factor gives an empty product.
TEST(Laws, EmptyFactor) {
  LawsReport rep = product_union_laws(parse("x > 0 and x < 1"), {"x"}, parse("y = y"), {"y"});
  EXPECT_EQ(rep.ubd_x, 0u);
  EXPECT_EQ(rep.ubd_y, 1u);
  EXPECT_EQ(rep.ubd_product, 0u);
  EXPECT_TRUE(rep.pass());
}

// X_b = {x : b <= x and (x <= 2b or b < 0)} is bounded exactly when b >= 0.
TEST(Parametric, BoundednessLayer) {
  Formula X = parse("b <= x and (x <= 2*b or b < 0)");
  Formula cond = bounded_condition(X, {"x"});
  NormalForm nf = normal_form(X, {"x"}, {"b"});
  EXPECT_TRUE(certify(nf, X).pass);
  EXPECT_TRUE(valid(Formula::conj({Formula::implies(cond, ubd_layer(nf, 0)), Formula::implies(ubd_layer(nf, 0), cond)})));
  for (long b = -4; b <= 4; ++b) {
    Formula inst = substitute(X, "b", LinearTerm(Int(b)));
    bool bounded = eval(cond, Assignment<Int>{{"b", Int(b)}});
    EXPECT_EQ(bounded, b >= 0);
    EXPECT_EQ(ubd(inst, {"x"}) == 0, bounded) << b;
  }
  Assignment<NonstdInt> big{{"b", NonstdInt::parse("1;0", 1)}};
  Assignment<NonstdInt> neg{{"b", NonstdInt::parse("-1;3", 1)}};
  EXPECT_TRUE(eval(cond, big));
  EXPECT_EQ(ubd_at(nf, big), 0u);
  EXPECT_FALSE(eval(cond, neg));
  EXPECT_EQ(ubd_at(nf, neg), 1u);
}

// Random sets: certificates, pointwise bijection, boundedness agreement and
// the ambient-arity bound.
TEST(Properties, RandomSetsNormalize) {
  oracle::FormulaGen gen(41);
  for (int i = 0; i < 30; ++i) {
    auto vars = oracle::var_names(gen.uniform(1, 2));
    Formula X = gen.qf(vars);
    SCOPED_TRACE(to_string(X));
    NormalForm nf = normal_form(X, vars);
    NormalFormReport rep = certify(nf, X);
    ASSERT_TRUE(rep.pass) << (rep.failures.empty() ? "" : rep.failures[0]);
    auto res = oracle::pointwise_bijection(nf, X, 4);
    EXPECT_TRUE(res.ok) << res.message;
    EXPECT_EQ(is_bounded(X, vars), nf.r == 0);
    EXPECT_LE(nf.r, vars.size());
  }
}
