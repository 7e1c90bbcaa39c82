#include <cmath>
#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "blq/error.hpp"
#include "blq/grid.hpp"
#include "blq/rng.hpp"

namespace blq {
namespace {

Matrix row(std::initializer_list<double> v) {
  Matrix m(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) m(0, i++) = x;
  return m;
}

TEST(Pushforward, PreservesMass) {
  Rng rng(1);
  GridSpec g = GridSpec::cube(2, -1.0, 1.0, 48);
  for (int t = 0; t < 10; ++t) {
    GridFunction f = random_piecewise_constant(g, 5, rng);
    Matrix b = row({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    GridSpec target = matched_image_grid(g, b);
    for (auto kernel : {DepositKernel::nearest, DepositKernel::linear}) {
      GridFunction pf = grid_pushforward(f, b, target, 3, kernel);
      EXPECT_NEAR(pf.mass(), f.mass(), 1e-12 * std::max(1.0, f.mass()));
    }
  }
}

TEST(Pushforward, CoordinateProjectionOfGaussianIsItsMarginal) {
  GridSpec g = GridSpec::cube(2, -4.0, 4.0, 128);
  GridFunction f = GridFunction::sample(g, [](const Vector& x) { return std::exp(-M_PI * x.squaredNorm()); });
  GridSpec axis({-4.0}, {4.0}, {128});
  GridFunction m = grid_pushforward(f, row({1.0, 0.0}), axis);
  for (std::size_t i = 0; i < 128; i += 9) {
    double x = axis.center(0, i);
    EXPECT_NEAR(m.values()[i], std::exp(-M_PI * x * x), 1e-6);
  }
}

TEST(Pushforward, EscapingMassRaisesCoverageError) {
  GridSpec g = GridSpec::cube(2, -1.0, 1.0, 8);
  GridFunction f(g, std::vector<double>(g.size(), 1.0));
  GridSpec small({-0.5}, {0.5}, {4});
  EXPECT_THROW(grid_pushforward(f, row({1.0, 0.0}), small), CoverageError);
}

TEST(Norms, LpOfIndicatorIsMeasurePower) {
  GridSpec g = GridSpec::cube(2, 0.0, 1.0, 10);
  GridFunction f = GridFunction::sample(g, [](const Vector& x) { return x(0) < 0.5 ? 1.0 : 0.0; });
  for (double p : {0.3, 0.5, 1.0, 2.0}) EXPECT_NEAR(lp_norm(f, p), std::pow(0.5, 1.0 / p), 1e-12);
  EXPECT_EQ(lp_norm(f, std::numeric_limits<double>::infinity()), 1.0);
}

TEST(Coarsening, PreservesMass) {
  Rng rng(5);
  GridFunction f = random_piecewise_constant(GridSpec::cube(3, -1.0, 1.0, 16), 3, rng);
  EXPECT_NEAR(f.coarsened().mass(), f.mass(), 1e-13);
}

TEST(AdjointMargin, RandomFunctionsNeverViolateLoomisWhitney) {
  BLDatum lw = data::loomis_whitney(2);
  Rng rng(8);
  GridSpec g = GridSpec::cube(2, -1.0, 1.0, 32);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> theta{rng.uniform(0.05, 0.95), 0.0};
    theta[1] = 1.0 - theta[0];
    AdjointParams a = derive_adjoint_exponents(lw, theta, rng.uniform(0.1, 0.99));
    GridFunction f = random_piecewise_constant(g, 4, rng);
    if (f.mass() == 0.0) continue;
    InequalityMargin m = adjoint_margin(f, lw, a, 1.0, AdjointMode::forward);
    EXPECT_TRUE(m.holds()) << "margin " << m.margin << " estimate " << m.quadrature_estimate;
  }
}

TEST(AdjointMargin, ReverseFormHoldsForHolder) {
  // Reverse form with one positive weight on the two-copy Holder datum.
  BLDatum h = data::holder_identity(1, 2);
  AdjointParams a = derive_adjoint_exponents(h, std::vector<double>{2.0, -1.0}, 2.0);
  Rng rng(9);
  GridSpec g = GridSpec::cube(1, -1.0, 1.0, 64);
  for (int t = 0; t < 50; ++t) {
    GridFunction f = random_piecewise_constant(g, 6, rng, 0.0);
    MarginOptions o;
    o.targets = {g, g};
    InequalityMargin m = adjoint_margin(f, h, a, 1.0, AdjointMode::reverse, o);
    EXPECT_TRUE(m.holds()) << m.margin;
  }
}

TEST(TensorDistance, ZeroForProducts) {
  GridSpec g = GridSpec::cube(2, -1.0, 1.0, 20);
  GridFunction f = GridFunction::sample(g, [](const Vector& x) { return (1 + x(0) * x(0)) * std::exp(x(1)); });
  EXPECT_LT(tensor_distance(f), 1e-12);
  GridFunction h = GridFunction::sample(g, [](const Vector& x) { return x(0) + x(1) > 0 ? 1.0 : 0.0; });
  EXPECT_GT(tensor_distance(h), 0.1);
}

TEST(GridFiles, RoundTripBothFormats) {
  Rng rng(12);
  GridFunction f = random_piecewise_constant(GridSpec({-1.0, 0.0}, {1.0, 3.0}, {6, 5}), 3, rng);
  for (auto fmt : {GridFormat::binary, GridFormat::csv}) {
    std::stringstream s;
    write_grid(s, f, fmt);
    GridFunction g = read_grid(s);
    EXPECT_EQ(g.spec(), f.spec());
    for (std::size_t i = 0; i < f.values().size(); ++i) EXPECT_DOUBLE_EQ(g.values()[i], f.values()[i]);
  }
}

}  // namespace
}  // namespace blq
