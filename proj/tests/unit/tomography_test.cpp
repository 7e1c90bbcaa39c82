#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "blq/error.hpp"
#include "blq/rng.hpp"
#include "blq/tomography.hpp"

namespace blq {
namespace {

using std::numbers::pi;

GridFunction gaussian(std::size_t d, std::size_t n, double half) {
  return GridFunction::sample(GridSpec::cube(d, -half, half, n),
                              [](const Vector& x) { return std::exp(-pi * x.squaredNorm()); });
}

TEST(Directions, UniformSetsAreValidProbabilityMeasures) {
  for (std::size_t d : {2u, 3u}) {
    DirectionSet s = DirectionSet::uniform(d, 50);
    double w = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_NEAR(s.directions[i].norm(), 1.0, 1e-12);
      w += s.weights[i];
    }
    EXPECT_NEAR(w, 1.0, 1e-12);
  }
  EXPECT_THROW(DirectionSet({Vector::Constant(2, 1.0)}, {1.0}), DomainError);
}

TEST(Xray, PreservesMass) {
  Rng rng(2);
  DirectionSet dirs = DirectionSet::uniform(2, 60);
  for (int t = 0; t < 5; ++t) {
    GridFunction f = random_piecewise_constant(GridSpec::cube(2, -1.0, 1.0, 48), 4, rng);
    EXPECT_NEAR(xray_transform(f, dirs).mass() / f.mass(), 1.0, 1e-3);
  }
}

// Largest deviation of the transform of exp(-pi|x|^2) from exp(-pi|y|^2).
double gaussian_transform_error(const TomogramSamples& t) {
  double worst = 0.0;
  for (std::size_t j = 0; j < t.values.size(); ++j)
    for (std::size_t v = 0; v < t.offsets.size(); ++v) {
      Vector y = t.center + t.complements[j] * t.offsets.point(v);
      worst = std::max(worst, std::abs(t.values[j][v] - std::exp(-pi * y.squaredNorm())));
    }
  return worst;
}

TEST(Xray, GaussianLineIntegralsConvergeAtSecondOrder) {
  DirectionSet dirs = DirectionSet::uniform(2, 7);
  double coarse = gaussian_transform_error(xray_transform(gaussian(2, 64, 4.0), dirs));
  double fine = gaussian_transform_error(xray_transform(gaussian(2, 128, 4.0), dirs));
  EXPECT_LT(fine, 3e-3);
  EXPECT_GT(coarse / fine, 3.0);
}

TEST(Xray, QuarterTurnLeavesNormsUnchanged) {
  Rng rng(3);
  GridSpec g = GridSpec::cube(2, -1.0, 1.0, 32);
  GridFunction f = random_piecewise_constant(g, 4, rng);
  std::vector<double> rotated(g.size());
  for (std::size_t i = 0; i < 32; ++i)
    for (std::size_t j = 0; j < 32; ++j) rotated[(31 - j) * 32 + i] = f.values()[i * 32 + j];
  GridFunction r(g, rotated);
  DirectionSet dirs = DirectionSet::uniform(2, 40);
  for (double q : {0.5, 1.0, 2.0})
    EXPECT_NEAR(xray_transform(r, dirs).lq_norm(q), xray_transform(f, dirs).lq_norm(q),
                1e-3 * xray_transform(f, dirs).lq_norm(q));
}

TEST(Kplane, LinesInThePlaneAreTheXrayTransform) {
  Rng rng(4);
  GridFunction f = random_piecewise_constant(GridSpec::cube(2, -1.0, 1.0, 24), 3, rng);
  DirectionSet dirs = DirectionSet::uniform(2, 12);
  TomogramSamples a = kplane_transform(f, PlaneSet::lines(dirs));
  TomogramSamples b = xray_transform(f, dirs);
  ASSERT_EQ(a.values.size(), b.values.size());
  for (std::size_t j = 0; j < a.values.size(); ++j)
    for (std::size_t v = 0; v < a.values[j].size(); ++v) EXPECT_DOUBLE_EQ(a.values[j][v], b.values[j][v]);
}

TEST(Kplane, PlaneIntegralsOfGaussianConvergeAtSecondOrder) {
  PlaneSet planes = PlaneSet::hyperplanes(DirectionSet::uniform(3, 5));
  double coarse = gaussian_transform_error(kplane_transform(gaussian(3, 24, 3.0), planes));
  double fine = gaussian_transform_error(kplane_transform(gaussian(3, 48, 3.0), planes));
  EXPECT_LT(fine, 2e-2);
  EXPECT_GT(coarse / fine, 3.0);
}

TEST(Exponents, ScalingLineValues) {
  // (1/2)(1 - 1/q) = 1 - 1/p at p = 1/2 gives q = 1/3.
  EXPECT_NEAR(kplane_exponent(0.5, 2, 1), 1.0 / 3.0, 1e-15);
  double q = kplane_exponent(0.7, 3, 2);
  EXPECT_NEAR((1.0 - 1.0 / q) / 3.0, 1.0 - 1.0 / 0.7, 1e-14);
  double r = xx_exponent(3, 2.0, 0.5);
  EXPECT_NEAR((1.0 / 0.5 - 0.5) * (1.0 - 1.0 / r), 0.5 * 0.5 * (1.0 / 0.5 - 1.0), 1e-14);
}

TEST(LowerBound, OffLineExponentsAreRejected) {
  Rng rng(5);
  GridFunction f = random_piecewise_constant(GridSpec::cube(2, -1.0, 1.0, 16), 2, rng);
  EXPECT_THROW(tomography_lower_bound_margin(f, 0.5, 0.25, 1, PlaneSet::lines(DirectionSet::uniform(2, 8))),
               DomainError);
}

TEST(LowerBound, HoldsOnRandomFunctions) {
  Rng rng(6);
  PlaneSet lines = PlaneSet::lines(DirectionSet::uniform(2, 60));
  for (int t = 0; t < 10; ++t) {
    GridFunction f = random_piecewise_constant(GridSpec::cube(2, -1.0, 1.0, 32), 4, rng);
    if (f.mass() == 0.0) continue;
    EXPECT_TRUE(tomography_lower_bound_margin(f, 0.6, kplane_exponent(0.6, 2, 1), 1, lines).holds());
  }
}

TEST(GammaConstant, SinMomentKnownValues) {
  EXPECT_NEAR(sin_moment(0.0), 1.0, 1e-15);
  EXPECT_NEAR(sin_moment(2.0), 0.5, 1e-15);
  EXPECT_NEAR(sin_moment(1.0), 2.0 / pi, 1e-15);
  for (double a : {0.1, 0.5, 0.9}) EXPECT_NEAR(wedge_moment(2, a), sin_moment(a), 1e-12);
}

TEST(GammaConstant, SinMomentMatchesQuadrature) {
  for (double a : {0.3, 0.7}) {
    const int n = 200000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::pow(std::abs(std::sin(2 * pi * (i + 0.5) / n)), a);
    EXPECT_NEAR(s / n, sin_moment(a), 1e-6);
  }
}

TEST(RestrictedConstant, VanishesOnAGreatCircle) {
  EXPECT_EQ(restricted_xray_constant(DirectionSet::great_circle(16), 0.5, kplane_exponent(0.5, 3, 1), 2000, 1).value,
            0.0);
  McEstimate full = restricted_xray_constant(DirectionSet::uniform(3, 64), 0.5, kplane_exponent(0.5, 3, 1), 2000, 1);
  EXPECT_GT(full.value, 0.1);
}

TEST(Boxes, UnionAreaAndProjections) {
  std::vector<Box2> b{{0, 0, 2, 1}, {1, 0, 3, 2}};
  EXPECT_DOUBLE_EQ(union_area(b), 5.0);
  Vector e1(2);
  e1 << 1, 0;
  EXPECT_DOUBLE_EQ(projection_length(b, e1), 3.0);
  EXPECT_GT(averaged_loomis_whitney_margin(b, DirectionSet::uniform(2, 90)), 0.0);
}

TEST(EntropySequence, GaussianIsConstantPerDimension) {
  auto seq = kplane_entropy_sequence(gaussian(2, 128, 4.0), 30);
  ASSERT_EQ(seq.size(), 2u);
  EXPECT_NEAR(seq[0], 0.5, 1e-4);
  EXPECT_NEAR(seq[1], 0.5, 5e-3);
}

TEST(Export, CsvHasOneRowPerSample) {
  Rng rng(7);
  GridFunction f = random_piecewise_constant(GridSpec::cube(2, -1.0, 1.0, 8), 2, rng);
  TomogramSamples t = xray_transform(f, DirectionSet::uniform(2, 3));
  std::ostringstream os;
  write_tomogram_csv(os, t);
  std::string s = os.str();
  EXPECT_EQ(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')), 1 + 3 * t.offsets.size());
}

}  // namespace
}  // namespace blq
