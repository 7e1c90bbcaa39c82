#include <cmath>

#include <gtest/gtest.h>

#include "blq/discrete.hpp"
#include "blq/error.hpp"
#include "blq/rng.hpp"

namespace blq {
namespace {

TEST(Subgroups, CountsMatchKnownValues) {
  EXPECT_EQ(enumerate_subgroups(FiniteAbelianGroup({4})).size(), 3u);
  EXPECT_EQ(enumerate_subgroups(FiniteAbelianGroup({6})).size(), 4u);
  EXPECT_EQ(enumerate_subgroups(FiniteAbelianGroup({2, 2})).size(), 5u);
  EXPECT_EQ(enumerate_subgroups(FiniteAbelianGroup({2, 4})).size(), 8u);
  EXPECT_EQ(enumerate_subgroups(FiniteAbelianGroup({2, 2, 2})).size(), 16u);
  EXPECT_EQ(enumerate_subgroups(FiniteAbelianGroup({4, 4})).size(), 15u);
  EXPECT_EQ(enumerate_subgroups(FiniteAbelianGroup({2, 2, 2, 2})).size(), 67u);
}

TEST(Subgroups, EveryEnumeratedSetIsClosed) {
  FiniteAbelianGroup g({2, 6});
  for (const auto& h : enumerate_subgroups(g)) {
    EXPECT_EQ(g.order() % h.size(), 0u);
    for (auto a : h.elements)
      for (auto b : h.elements) EXPECT_TRUE(h.contains(g.add(a, b)));
  }
}

TEST(Homomorphism, RejectsMapsThatAreNotWellDefined) {
  EXPECT_THROW(GroupHom(FiniteAbelianGroup({3}), FiniteAbelianGroup({2}), {{1}}), DomainError);
  EXPECT_NO_THROW(GroupHom(FiniteAbelianGroup({4}), FiniteAbelianGroup({2}), {{1}}));
}

TEST(Pushforward, PreservesTotalMass) {
  FiniteAbelianGroup g({4, 6});
  GroupHom b(g, FiniteAbelianGroup({2}), {{1, 1}});
  Rng rng(4);
  std::vector<double> f(g.order());
  for (auto& v : f) v = rng.uniform();
  auto pf = discrete_pushforward(f, b);
  double s = 0.0, t = 0.0;
  for (double v : f) s += v;
  for (double v : pf) t += v;
  EXPECT_NEAR(s, t, 1e-12);
}

TEST(Constants, QuotientMapConstants) {
  FiniteAbelianGroup z4({4});
  std::vector<GroupHom> maps{GroupHom(z4, FiniteAbelianGroup({2}), {{1}})};
  auto c = DiscreteExponents::from_rationals({Rational(1)});
  // sup over subgroups H of |H| / |BH|: H = Z4 gives 4/2.
  BlsResult bls = bls_constant(z4, maps, c);
  EXPECT_DOUBLE_EQ(bls.value, 2.0);
  AblsResult abls = abls_constant(z4, maps, c, 1.0 / 3.0);
  EXPECT_NEAR(abls.value, 4.0, 1e-12);
  EXPECT_TRUE(same_ratio(abls.ratio, bls.ratio, c));
}

TEST(Constants, AdjointEqualsPowerOnLoomisWhitneyGroups) {
  for (std::int64_t n : {2, 3, 4, 6}) {
    FiniteAbelianGroup g({n, n});
    std::vector<GroupHom> maps{GroupHom(g, FiniteAbelianGroup({n}), {{1, 0}}),
                               GroupHom(g, FiniteAbelianGroup({n}), {{0, 1}})};
    auto c = DiscreteExponents::from_rationals({Rational(1), Rational(1)});
    BlsResult bls = bls_constant(g, maps, c);
    AblsResult abls = abls_constant(g, maps, c, 0.4);
    EXPECT_NEAR(abls.value, std::pow(bls.value, 1.0 / 0.4 - 1.0), 1e-12);
  }
}

TEST(Margins, RandomFunctionsSatisfyTheDiscreteInequality) {
  FiniteAbelianGroup g({4, 2});
  std::vector<GroupHom> maps{GroupHom(g, FiniteAbelianGroup({4}), {{1, 0}}),
                             GroupHom(g, FiniteAbelianGroup({2}), {{0, 1}})};
  auto c = DiscreteExponents::from_rationals({Rational(1), Rational(1)});
  AdjointParams a = derive_discrete_exponents(c, {Rational(1, 4), Rational(3, 4)}, Rational(1, 2));
  double bl = bls_constant(g, maps, c).value;
  Rng rng(6);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> f(g.order());
    for (auto& v : f) v = rng.bernoulli(0.3) ? 0.0 : rng.uniform();
    f[0] += 1e-3;
    EXPECT_GE(discrete_adjoint_margin(f, maps, a, bl).margin, -1e-12);
  }
}

TEST(Margins, SubgroupIndicatorOfTheMaximizerIsExtremal) {
  FiniteAbelianGroup z4({4});
  std::vector<GroupHom> maps{GroupHom(z4, FiniteAbelianGroup({2}), {{1}})};
  auto c = DiscreteExponents::from_rationals({Rational(1)});
  AdjointParams a = derive_discrete_exponents(c, {Rational(1)}, Rational(1, 3));
  AblsResult abls = abls_constant(z4, maps, c, 1.0 / 3.0);
  std::vector<double> f(4, 0.0);
  for (auto x : abls.argmax.elements) f[x] = 1.0;
  EXPECT_NEAR(discrete_adjoint_margin(f, maps, a, 2.0).margin, 0.0, 1e-12);
}

}  // namespace
}  // namespace blq
