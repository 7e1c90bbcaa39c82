#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "blq/gowers.hpp"
#include "blq/rng.hpp"

namespace blq {
namespace {

std::vector<double> random_f(std::size_t n, Rng& rng) {
  std::vector<double> f(n);
  for (auto& v : f) v = rng.uniform();
  return f;
}

TEST(Gowers, DeltaHasUnitNorm) {
  std::vector<double> f(16, 0.0);
  f[5] = 1.0;
  for (std::size_t d : {1u, 2u, 3u, 4u}) EXPECT_NEAR(gowers_norm(f, d), 1.0, 1e-12);
}

TEST(Gowers, ConstantNormIsPowerOfN) {
  for (std::size_t n : {8u, 17u}) {
    std::vector<double> f(n, 1.0);
    for (std::size_t d : {1u, 2u, 3u})
      EXPECT_NEAR(gowers_norm(f, d), std::pow(double(n), double(d + 1) / double(1u << d)), 1e-9);
  }
}

TEST(Gowers, FirstOrderIsTheSum) {
  Rng rng(1);
  auto f = random_f(20, rng);
  double s = 0.0;
  for (double v : f) s += v;
  EXPECT_NEAR(gowers_norm(f, 1), s, 1e-12);
}

TEST(Gowers, StreamingMatchesLiteralSum) {
  Rng rng(2);
  for (std::size_t d : {2u, 3u}) {
    auto f = random_f(12, rng);
    EXPECT_NEAR(gowers_norm(f, d), gowers_norm_direct(f, d), 1e-10 * gowers_norm(f, d));
  }
}

TEST(Gowers, SecondOrderMatchesFourier) {
  Rng rng(3);
  auto f = random_f(64, rng);
  EXPECT_NEAR(gowers_norm(f, 2), gowers_u2_fourier(f), 1e-9);
}

TEST(Gowers, TranslationInvariant) {
  Rng rng(4);
  auto f = random_f(30, rng);
  std::vector<double> g(30);
  for (std::size_t x = 0; x < 30; ++x) g[(x + 7) % 30] = f[x];
  EXPECT_NEAR(gowers_norm(f, 3), gowers_norm(g, 3), 1e-10);
}

TEST(LogConvexity, WeightSolvesTheExponentRelation) {
  for (std::size_t d : {2u, 3u, 5u}) {
    double w = logconvexity_weight(d);
    double lhs = double(d + 1) / double(1u << d);
    double rhs = w * double(d) / double(1u << (d - 1)) + (1 - w) * double(d + 2) / double(1u << (d + 1));
    EXPECT_NEAR(lhs, rhs, 1e-15);
  }
}

TEST(LogConvexity, RandomFunctionsHaveNonNegativeMargin) {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) EXPECT_GE(gowers_logconvexity_margin(random_f(32, rng), 2), -1e-12);
  EXPECT_NEAR(gowers_logconvexity_margin(std::vector<double>(32, 1.0), 2), 0.0, 1e-10);
}

TEST(Parallelepipeds, CountsAreGowersSumsOfTheIndicator) {
  Rng rng(6);
  std::vector<bool> a(24);
  std::vector<double> f(24);
  for (std::size_t x = 0; x < 24; ++x) f[x] = (a[x] = rng.bernoulli(0.4)) ? 1.0 : 0.0;
  EXPECT_NEAR(double(count_parallelograms(a)), std::pow(gowers_norm(f, 2), 4), 1e-6);
  EXPECT_NEAR(double(count_parallelepipeds(a)), std::pow(gowers_norm(f, 3), 8), 1e-4);
  EXPECT_TRUE(parallelepiped_check(a).holds);
}

TEST(Profile, CsvParseEmitParseIsIdentity) {
  Rng rng(7);
  std::stringstream s;
  write_profile_csv(s, gowers_profile(random_f(16, rng), 4));
  GowersProfile first = read_profile_csv(s);
  std::stringstream again;
  write_profile_csv(again, first);
  GowersProfile second = read_profile_csv(again);
  EXPECT_EQ(second.orders, first.orders);
  EXPECT_EQ(second.abscissae, first.abscissae);
  EXPECT_EQ(second.norms, first.norms);
}

TEST(RealLine, ScanRatiosAreBoundedByOne) {
  for (const auto& e : real_line_ratio_scan(32)) {
    EXPECT_GT(e.ratio, 0.0) << e.name;
    EXPECT_LE(e.ratio, 1.0 + 1e-12) << e.name;
  }
}

}  // namespace
}  // namespace blq
