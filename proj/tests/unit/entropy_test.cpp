#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "blq/entropy.hpp"
#include "blq/error.hpp"
#include "blq/rng.hpp"

namespace blq {
namespace {

using std::numbers::pi;

TEST(Entropy, UniformOnMAtomsIsLogM) {
  for (std::size_t m : {1u, 2u, 7u, 100u}) EXPECT_NEAR(shannon_entropy(DiscreteDensity(std::vector<double>(m, 3.0))), std::log(m), 1e-12);
  EXPECT_THROW(DiscreteDensity(std::vector<double>(3, 0.0)).normalized(), DomainError);
}

TEST(Entropy, GaussianHasHalfNatPerDimension) {
  for (std::size_t d : {1u, 2u}) {
    GridFunction f = GridFunction::sample(GridSpec::cube(d, -5.0, 5.0, d == 1 ? 2000 : 200),
                                          [](const Vector& x) { return std::exp(-pi * x.squaredNorm()); });
    EXPECT_NEAR(shannon_entropy(DiscreteDensity::from_grid(f)), 0.5 * static_cast<double>(d), 1e-6);
  }
}

TEST(Entropy, RenyiTendsToShannon) {
  Rng rng(1);
  std::vector<double> w(50);
  for (auto& x : w) x = rng.uniform();
  DiscreteDensity f(w);
  double h = shannon_entropy(f);
  EXPECT_NEAR(renyi_entropy(f, 1.0 - 1e-6), h, 1e-5);
  EXPECT_NEAR(renyi_entropy(f, 1.0 + 1e-6), h, 1e-5);
  EXPECT_GT(renyi_entropy(f, 0.5), h);
  EXPECT_LT(renyi_entropy(f, 2.0), h);
}

TEST(Entropy, EscortVarianceIsMinusPTimesEntropyDerivative) {
  Rng rng(2);
  std::vector<double> w(40);
  for (auto& x : w) x = rng.uniform(0.01, 1.0);
  DiscreteDensity f(w);
  for (double p : {0.3, 0.8, 1.5}) {
    const double h = 1e-5;
    double dh = (shannon_entropy(f.escort(p + h)) - shannon_entropy(f.escort(p - h))) / (2 * h);
    EXPECT_NEAR(escort_log_variance(f, p), -p * dh, 1e-7);
  }
}

TEST(EntropicMargin, CorrelatedGaussianMatchesLogDeterminant) {
  GridFunction f = GridFunction::sample(GridSpec::cube(2, -6.0, 6.0, 128), [](const Vector& x) {
    return std::exp(-(x(0) * x(0) - x(0) * x(1) + x(1) * x(1)) / 1.5);
  });
  // Covariance [[1, .5], [.5, 1]]: margin is -log(det of the correlation matrix) / 2.
  EntropicMargin m = entropic_bl_margin(f, data::loomis_whitney(2), 1.0);
  EXPECT_NEAR(m.value, -0.5 * std::log(0.75), 5e-3);
  EXPECT_TRUE(m.holds(1e-3));
}

TEST(AdjointRatio, LogDerivativeMatchesEntropyFormula) {
  Rng rng(3);
  GridFunction f = random_piecewise_constant(GridSpec::cube(2, -1.0, 1.0, 32), 4, rng, 0.1);
  BLDatum lw = data::loomis_whitney(2);
  std::vector<double> theta{0.35, 0.65};
  for (double p : {0.4, 0.7}) {
    const double h = 1e-5;
    double fd = (log_adjoint_ratio(f, lw, theta, p + h, 1.0) - log_adjoint_ratio(f, lw, theta, p - h, 1.0)) / (2 * h);
    EXPECT_NEAR(p * p * fd, log_adjoint_ratio_derivative(f, lw, theta, p, 1.0), 1e-6);
  }
}

TEST(Probe, IndicatorsGiveNonPositiveValues) {
  GridFunction f = GridFunction::sample(GridSpec::cube(2, -1.0, 1.0, 64), [](const Vector& x) {
    return (x(0) < 0.0 || x(1) < 0.0) && x.norm() < 0.9 ? 1.0 : 0.0;
  });
  EXPECT_LE(p_entropy_probe(f, data::loomis_whitney(2), {0.5, 0.5}, 0.5, 1.0), 1e-3);
}

TEST(Ridders, ReproducesClosedFormCurvature) {
  for (long double q : {0.25L, 0.5L, 1.0L, 2.0L}) {
    long double err = 0;
    long double fd = ridders_second_derivative(escort_curvature_profile, q, 0.1L, &err);
    EXPECT_NEAR(static_cast<double>(fd), static_cast<double>(escort_curvature_exact(q)), 1e-12);
  }
  EXPECT_NEAR(static_cast<double>(escort_curvature_exact(0.25L)), 0.4096, 1e-15);
}

TEST(TensorEscort, SignChangesAcrossTheCounterexample) {
  const std::size_t n = 4000;
  std::vector<double> g(n), meas(n, 1.0 / n);
  for (std::size_t i = 0; i < n; ++i) g[i] = 1.0 + 0.05 * std::sqrt(2.0) * std::cos(2 * pi * (i + 0.5) / n);
  DiscreteDensity d(g, meas);
  EXPECT_LT(tensor_escort_margin(d, 0.25, 0.1), 0.0);
  EXPECT_GT(tensor_escort_margin(d, 2.0, 0.1), 0.0);
}

}  // namespace
}  // namespace blq
