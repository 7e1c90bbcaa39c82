#include <cmath>

#include <gtest/gtest.h>

#include "blq/gaussian.hpp"
#include "blq/perturbation.hpp"
#include "blq/rng.hpp"

namespace blq {
namespace {

// Sharp Young constant for three exponents p_j: prod_j (p_j^{1/p_j} / p_j'^{1/p_j'})^{1/2}.
double young_oracle(double p) {
  double pc = p / (p - 1.0);
  double a = std::sqrt(std::pow(p, 1.0 / p) / std::pow(pc, 1.0 / pc));
  return a * a * a;
}

TEST(GaussianConstant, LoomisWhitneyAndHolderAreOne) {
  EXPECT_NEAR(bl_gaussian_constant(data::loomis_whitney(2)).value, 1.0, 1e-9);
  EXPECT_NEAR(bl_gaussian_constant(data::loomis_whitney(3)).value, 1.0, 1e-9);
  EXPECT_NEAR(bl_gaussian_constant(data::holder_identity(3, 2)).value, 1.0, 1e-9);
  EXPECT_NEAR(bl_gaussian_constant(data::finner()).value, 1.0, 1e-9);
}

TEST(GaussianConstant, YoungMatchesSharpConstant) {
  double oracle = young_oracle(1.5);
  EXPECT_NEAR(oracle, std::sqrt(3.0) / 2.0, 1e-14);
  EXPECT_NEAR(bl_gaussian_constant(data::young()).value, oracle, 1e-6);
}

TEST(GaussianConstant, InvariantUnderInvertibleChangeOfTargetCoordinates) {
  BLDatum base = data::young();
  Rng rng(3);
  std::vector<Matrix> maps;
  double scale_sum = 0.0;
  for (std::size_t i = 0; i < base.k(); ++i) {
    double u = rng.uniform(0.5, 2.0);
    maps.push_back(u * base.map(i));
    scale_sum += base.c(i) * std::log(u);
  }
  BLDatum scaled(maps, base.c());
  // Scaling B_i by u_i multiplies the constant by prod u_i^{-c_i}.
  EXPECT_NEAR(bl_gaussian_constant(scaled).log_value, bl_gaussian_constant(base).log_value - scale_sum, 1e-7);
}

TEST(GaussianConstant, GradientMatchesFiniteDifferences) {
  BLDatum d = random_feasible_datum(7, 3);
  Rng rng(11);
  std::vector<SpdMatrix> forms;
  for (std::size_t i = 0; i < d.k(); ++i) {
    auto n = static_cast<Eigen::Index>(d.dim(i));
    Matrix g = Matrix::NullaryExpr(n, n, [&] { return rng.normal(); });
    forms.emplace_back(g * g.transpose() + Matrix::Identity(n, n));
  }
  auto grad = bl_log_objective_gradient(d, forms);
  const double h = 1e-6;
  for (std::size_t i = 0; i < d.k(); ++i) {
    auto n = static_cast<Eigen::Index>(d.dim(i));
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c <= r; ++c) {
        Matrix e = Matrix::Zero(n, n);
        e(r, c) += 0.5;
        e(c, r) += 0.5;
        auto up = forms, dn = forms;
        up[i] = SpdMatrix(forms[i].matrix() + h * e);
        dn[i] = SpdMatrix(forms[i].matrix() - h * e);
        double fd = (bl_log_objective(d, up) - bl_log_objective(d, dn)) / (2 * h);
        double an = (grad[i].array() * e.array()).sum();
        EXPECT_NEAR(fd, an, 1e-6 * std::max(1.0, std::abs(an)));
      }
  }
}

TEST(GaussianPushforward, MarginalOfStandardGaussianIsStandard) {
  Matrix b(1, 2);
  b << 1, 0;
  GaussianPushforward g = gaussian_pushforward(SpdMatrix::identity(2), b);
  EXPECT_NEAR(g.amplitude, 1.0, 1e-14);
  EXPECT_NEAR(g.form.matrix()(0, 0), 1.0, 1e-14);
}

TEST(IdentityAi, TwoOptimizationsAgreeOnNamedData) {
  for (const BLDatum& d : {data::young(), data::finner(), random_feasible_datum(7, 0)}) {
    IdentityResidual r = identity_ai_residual(d);
    EXPECT_LT(r.residual, 1e-6);
  }
}

TEST(AdjointConstant, EqualsPrefactorTimesPowerOfGaussianConstant) {
  BLDatum d = data::young();
  double bl = bl_gaussian_constant(d).value;
  for (double p : {0.3, 0.6, 0.9}) {
    AdjointParams a = derive_adjoint_exponents(d, std::vector<double>{0.2, 0.5, 0.3}, p);
    double expected = adjoint_gaussian_prefactor(a, d.dims(), d.ambient_dim()) * std::pow(bl, 1.0 / p - 1.0);
    EXPECT_NEAR(abl_gaussian_constant(d, a).value / expected, 1.0, 1e-6);
  }
}

TEST(Perturbation, GaussianIsNotALocalMaximizerForUnequalWeights) {
  BLDatum lw = data::loomis_whitney(2);
  AdjointParams a = derive_adjoint_exponents(lw, std::vector<double>{0.9, 0.1}, 0.5);
  PerturbationGap g = perturbation_gap(lw, a, 0.01, GridSpec::cube(2, -8.0, 8.0, 256));
  EXPECT_GT(g.coefficient, 0.0);
  EXPECT_GT(g.coefficient, 10.0 * g.self_estimate);
  EXPECT_NEAR(g.finite_difference, g.coefficient, 0.05 * g.coefficient);
}

}  // namespace
}  // namespace blq
