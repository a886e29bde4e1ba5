#include "presburger/zgroup.hpp"
#include "support/groups.hpp"

#include <gtest/gtest.h>

using namespace presburger;

namespace {

NonstdInt el(const char* text, std::size_t levels = 1) { return NonstdInt::parse(text, levels); }

// r = 0 or 1, s = 1, b_1 = a_1 = omega.
ExtGroupSpec omega_spec(std::size_t r, const char* twist = "0;3") {
  Scale sc = Scale::standard(1);
  std::vector<ModelTuple> v{r ? ModelTuple{el(twist)} : ModelTuple{}};
  return ExtGroupSpec(r, LocalLattice(sc, {{el("1;0")}}), v);
}

}  // namespace

TEST(Scale, ConvexSubgroups) {
  Scale sc = Scale::standard(1);
  EXPECT_TRUE(in_O({el("5/2;1000")}, sc));
  EXPECT_FALSE(in_o({el("5/2;1000")}, sc));
  EXPECT_TRUE(in_o({el("0;1000000")}, sc));
  EXPECT_TRUE(in_O({el("1;0")}, sc));
  EXPECT_FALSE(in_o({el("1;0")}, sc));
  Scale two = Scale::standard(2);
  // a_1 sits at the lower infinite level, a_2 at the upper one.
  EXPECT_TRUE(in_O({el("0,7;1", 2), el("3,0;0", 2)}, two));
  EXPECT_FALSE(in_O({el("1,0;0", 2), el("0,0;0", 2)}, two));
  EXPECT_THROW(LocalLattice(Scale{{el("0;5")}}, {{el("1;0")}}), std::invalid_argument);
}

TEST(Scale, StandardPart) {
  Scale sc = Scale::standard(1);
  EXPECT_EQ(std_part({el("3/2;7")}, sc), std::vector<Rat>{Rat(3, 2)});
  EXPECT_THROW(std_part({el("1;0", 2)}, Scale::standard(2)), std::invalid_argument);
}

TEST(Lattice, ReduceByOmega) {
  ExtGroupSpec spec = omega_spec(0);
  Reduction red = reduce({el("3/2;7")}, spec.lattice);
  EXPECT_EQ(red.rep, (ModelTuple{el("1/2;7")}));
  EXPECT_EQ(red.coeffs, std::vector<Int>{Int(1)});
  Reduction again = reduce(red.rep, spec.lattice);
  EXPECT_EQ(again.rep, red.rep);
  EXPECT_EQ(again.coeffs, std::vector<Int>{Int(0)});
  EXPECT_EQ(reduce({el("-1/3;0")}, spec.lattice).rep, (ModelTuple{el("2/3;0")}));
}

TEST(Lattice, DependentGeneratorsRejected) {
  Scale sc = Scale::standard(2);
  std::vector<ModelTuple> b{{el("1,0;0", 2), el("0,2;0", 2)}, {el("2,0;0", 2), el("0,4;0", 2)}};
  EXPECT_THROW(LocalLattice(sc, b), std::invalid_argument);
}

TEST(Lattice, TranslationEquivariance) {
  ExtGroupSpec spec = oracle::random_ext_spec(1, 2, 3);
  ExtSampler gen(spec, 5);
  for (int i = 0; i < 1000; ++i) {
    ModelTuple x = gen.bounded_element();
    Reduction a = reduce(x, spec.lattice);
    Reduction b = reduce(x + spec.lattice.generators()[0], spec.lattice);
    ASSERT_EQ(b.rep, a.rep);
    EXPECT_EQ(b.coeffs[0], a.coeffs[0] + 1);
    EXPECT_EQ(b.coeffs[1], a.coeffs[1]);
    EXPECT_TRUE(spec.lattice.is_reduced(a.rep));
  }
}

TEST(Lattice, MeetsInfinitesimalsTrivially) {
  ExtGroupSpec spec = oracle::random_ext_spec(0, 2, 11);
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<long> c(-6, 6);
  for (int i = 0; i < 1000; ++i) {
    Int l1 = c(rng), l2 = c(rng);
    ModelTuple w = l1 * spec.lattice.generators()[0] + l2 * spec.lattice.generators()[1];
    EXPECT_EQ(in_o(w, spec.lattice.scale()), l1 == 0 && l2 == 0);
  }
}

TEST(Extension, WraparoundInCircle) {
  ExtGroupSpec spec = omega_spec(0);
  ExtElement g{{}, {el("1/2;0")}}, h{{}, {el("3/4;0")}};
  EXPECT_EQ(ext_add(g, h, spec), (ExtElement{{}, {el("1/4;0")}}));
  EXPECT_EQ(ext_add(g, ext_zero(spec), spec), g);
  EXPECT_EQ(ext_neg(g, spec), g);
}

TEST(Extension, CarryMovesIntoTheLattice) {
  ExtGroupSpec spec = omega_spec(1);
  ExtElement g{{el("0;0")}, {el("1/2;0")}}, h{{el("0;1")}, {el("3/4;0")}};
  // (0,1/2w) + (1,3/4w) = (1, 5/4w) = (1 - 3, 1/4w) since (3, w) is zero.
  EXPECT_EQ(ext_add(g, h, spec), (ExtElement{{el("0;-2")}, {el("1/4;0")}}));
  EXPECT_EQ(ext_make({el("0;0")}, {el("1;0")}, spec), ext_include({el("0;-3")}, spec));
  EXPECT_EQ(g.to_string(), "(0;0 | 1/2;0)");
  EXPECT_THROW(ext_add(g, ExtElement{{el("0;0")}, {el("3/2;0")}}, spec), std::invalid_argument);
}

TEST(Cocycle, VanishesAgainstZeroAndMatchesGroupLaw) {
  ExtGroupSpec spec = oracle::random_ext_spec(2, 2, 7);
  ExtSampler gen(spec, 9);
  auto section = [&](const ModelTuple& x) { return ExtElement{zero_tuple(2, 2), x}; };
  for (int i = 0; i < 200; ++i) {
    ModelTuple x = gen.reduced(), y = gen.reduced();
    EXPECT_TRUE(is_zero(cocycle(x, zero_tuple(2, 2), spec)));
    EXPECT_EQ(cocycle(x, y, spec), section_cocycle(x, y, section, spec));
  }
  EXPECT_THROW(cocycle({el("3/2,0;0", 2), el("0;0", 2)}, zero_tuple(2, 2), spec), std::invalid_argument);
}

// s'(x) = s(x) + i(h(x)) shifts the cocycle by h(x+y) - h(x) - h(y).
TEST(Cocycle, CoboundaryChange) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    ExtGroupSpec spec = oracle::random_ext_spec(2, 2, seed);
    ExtSampler gen(spec, seed + 100);
    auto h = [&](const ModelTuple& x) {
      ModelTuple out;
      for (std::size_t k = 0; k < spec.r; ++k) {
        Int f = x[k % x.size()].finite();
        out.push_back(NonstdInt(spec.levels(), f % 17 + Int(k)) + NonstdInt::unit(spec.levels(), 0));
      }
      return out;
    };
    auto shifted = [&](const ModelTuple& x) { return ExtElement{h(x), x}; };
    for (int i = 0; i < 1000; ++i) {
      ModelTuple x = gen.reduced(), y = gen.reduced();
      ModelTuple xy = quotient_add(x, y, spec.lattice);
      ModelTuple expected = cocycle(x, y, spec) + h(xy) - h(x) - h(y);
      ASSERT_EQ(section_cocycle(x, y, shifted, spec), expected);
    }
  }
}

TEST(Verify, CircleGroup) {
  ExtensionReport rep = verify_extension(omega_spec(0), 500, 1);
  EXPECT_TRUE(rep.pass) << (rep.failures.empty() ? "" : rep.failures[0]);
  EXPECT_EQ(rep.ubd_kernel, 0u);
  EXPECT_EQ(rep.ubd_quotient, 0u);
}

TEST(Verify, LineOverCircle) {
  ExtensionReport rep = verify_extension(omega_spec(1), 1000, 7);
  EXPECT_TRUE(rep.pass) << (rep.failures.empty() ? "" : rep.failures[0]);
  EXPECT_EQ(rep.ubd_kernel, 1u);
  EXPECT_EQ(rep.checks.at("associativity"), 1000u);
}

TEST(Verify, RandomRankTwo) {
  ExtensionReport rep = verify_extension(oracle::random_ext_spec(2, 2, 7), 1000, 7);
  EXPECT_TRUE(rep.pass) << (rep.failures.empty() ? "" : rep.failures[0]);
  EXPECT_EQ(rep.ubd_kernel + rep.ubd_quotient, 2u);
}

TEST(Verify, PushoutSendsGeneratorsToMinusTwists) {
  ExtGroupSpec spec = omega_spec(1);
  ExtElement image = ext_make({el("0;0")}, {el("1;0")}, spec);
  EXPECT_NE(image, ext_include({el("0;3")}, spec));
  EXPECT_EQ(image, ext_include({el("0;-3")}, spec));
}
