#include <cmath>

#include <gtest/gtest.h>

#include "blq/bl_data.hpp"
#include "blq/error.hpp"
#include "blq/rng.hpp"

namespace blq {
namespace {

TEST(Exponents, RandomDrawsSatisfyTheCouplingRelation) {
  Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    std::size_t k = 1 + rng.below(5);
    std::vector<double> c(k), theta(k);
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      c[j] = rng.uniform(0.05, 2.0);
      theta[j] = rng.uniform(0.05, 1.0);
      sum += theta[j];
    }
    for (auto& t : theta) t /= sum;
    double p = rng.uniform(0.05, 1.0);
    AdjointParams a = derive_adjoint_exponents(c, theta, p);
    for (std::size_t j = 0; j < k; ++j) {
      double lhs = c[j] * (1.0 - 1.0 / p);
      double rhs = theta[j] * (1.0 - 1.0 / a.p_i[j]);
      EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(lhs)));
      EXPECT_GT(a.p_i[j], 0.0);
      EXPECT_LE(a.p_i[j], 1.0);
    }
  }
}

TEST(Exponents, ExactRationalsRoundTrip) {
  AdjointParams a = derive_adjoint_exponents(std::vector<Rational>{Rational(1), Rational(1)},
                                             std::vector<Rational>{Rational(1, 2), Rational(1, 2)}, Rational(1, 2));
  ASSERT_TRUE(a.p_i_exact.has_value());
  EXPECT_EQ((*a.p_i_exact)[0], Rational(1, 3));
  EXPECT_DOUBLE_EQ(a.p_i[1], 1.0 / 3.0);
}

TEST(Exponents, PrefactorIsOneExactlyWhenPIsOneOrThetaEqualsC) {
  BLDatum lw = data::loomis_whitney(2);
  auto pref = [&](std::vector<double> theta, double p) {
    return adjoint_gaussian_prefactor(derive_adjoint_exponents(lw, theta, p), lw.dims(), lw.ambient_dim());
  };
  EXPECT_NEAR(pref({0.3, 0.7}, 1.0), 1.0, 1e-15);
  EXPECT_NE(pref({0.3, 0.7}, 0.5), 1.0);
  // theta = c needs c summing to one, so use the two-copy Holder datum.
  BLDatum h = data::holder_identity(2, 2);
  AdjointParams a = derive_adjoint_exponents(h, std::vector<double>{0.5, 0.5}, 0.4);
  EXPECT_NEAR(adjoint_gaussian_prefactor(a, h.dims(), h.ambient_dim()), 1.0, 1e-14);
  AdjointParams b = derive_adjoint_exponents(h, std::vector<double>{0.3, 0.7}, 0.4);
  EXPECT_GT(std::abs(adjoint_gaussian_prefactor(b, h.dims(), h.ambient_dim()) - 1.0), 1e-3);
}

TEST(Exponents, ReverseModeNeedsOnePositiveWeight) {
  AdjointParams a = derive_adjoint_exponents(std::vector<double>{1.0, 1.0}, std::vector<double>{2.0, -1.0}, 2.0);
  EXPECT_EQ(a.mode, AdjointMode::reverse);
  EXPECT_THROW(derive_adjoint_exponents(std::vector<double>{1.0, 1.0}, std::vector<double>{0.5, 0.5}, 2.0),
               DomainError);
}

TEST(Feasibility, NamedDataAreFeasible) {
  EXPECT_EQ(validate_datum(data::loomis_whitney(3)).verdict, Verdict::feasible_heuristic);
  EXPECT_EQ(validate_datum(data::finner()).verdict, Verdict::feasible_heuristic);
  EXPECT_EQ(validate_datum(data::young()).verdict, Verdict::feasible_heuristic);
  EXPECT_TRUE(validate_datum(data::young()).scaling_exact);
}

TEST(Feasibility, ScalingFailureIsInfeasible) {
  Matrix e1(1, 2), e2(1, 2);
  e1 << 1, 0;
  e2 << 0, 1;
  BLDatum bad({e1, e2}, std::vector<double>{1.0, 0.5});
  FeasibilityReport r = validate_datum(bad);
  EXPECT_FALSE(r.scaling_ok);
  EXPECT_EQ(r.verdict, Verdict::infeasible);
}

TEST(Datum, RankDeficientMapIsReported) {
  Matrix b(2, 2);
  b << 1, 1, 2, 2;
  BLDatum d({b}, std::vector<double>{1.0});
  EXPECT_THROW(d.require_surjective(), NotSurjectiveError);
}

TEST(Datum, RandomFeasibleDataAreSmallAndReproducible) {
  for (std::size_t i = 0; i < 20; ++i) {
    BLDatum a = random_feasible_datum(7, i), b = random_feasible_datum(7, i);
    EXPECT_LE(a.ambient_dim(), 4u);
    EXPECT_LE(a.k(), 4u);
    ASSERT_EQ(a.k(), b.k());
    for (std::size_t j = 0; j < a.k(); ++j) EXPECT_EQ(a.map(j), b.map(j));
  }
}

}  // namespace
}  // namespace blq
