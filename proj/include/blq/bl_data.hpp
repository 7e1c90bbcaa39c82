#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blq/linalg.hpp"
#include "blq/rational.hpp"

namespace blq {

// A Brascamp-Lieb datum: surjective maps B_i : R^d -> R^{d_i} and exponents c_i > 0.
// Shapes and signs are checked on construction; surjectivity is checked by
// validate_datum and by every engine that needs it.
class BLDatum {
 public:
  BLDatum(std::vector<Matrix> maps, std::vector<double> exponents);
  // Exact exponents; the double values are derived from them.
  BLDatum(std::vector<Matrix> maps, std::vector<Rational> exponents);

  std::size_t k() const { return maps_.size(); }
  std::size_t ambient_dim() const { return ambient_dim_; }
  std::size_t dim(std::size_t i) const { return static_cast<std::size_t>(maps_[i].rows()); }
  std::vector<std::size_t> dims() const;

  const std::vector<Matrix>& maps() const { return maps_; }
  const Matrix& map(std::size_t i) const { return maps_[i]; }
  const std::vector<double>& c() const { return c_; }
  double c(std::size_t i) const { return c_[i]; }
  const std::optional<std::vector<Rational>>& c_exact() const { return c_exact_; }

  // Throws NotSurjectiveError naming the first rank-deficient map.
  void require_surjective() const;

 private:
  void check_shapes();

  std::vector<Matrix> maps_;
  std::vector<double> c_;
  std::optional<std::vector<Rational>> c_exact_;
  std::size_t ambient_dim_ = 0;
};

enum class Verdict { feasible_heuristic, infeasible, undetermined };
std::string to_string(Verdict v);

struct SubspaceCheck {
  std::string family;  // "zero", "full", "kernel", "kernel-intersection", ...
  std::size_t dim = 0;
  double weighted_image_dim = 0.0;  // sum_i c_i dim(B_i V)
  bool pass = true;
};

struct FeasibilityReport {
  bool scaling_ok = false;
  bool scaling_exact = false;  // decided in rational arithmetic
  double scaling_sum = 0.0;    // sum_i c_i d_i
  std::vector<SubspaceCheck> tested_subspaces;
  Verdict verdict = Verdict::undetermined;
};

struct FeasibilityOptions {
  std::size_t n_random = 4;  // random subspaces per dimension
  std::uint64_t seed = 0;
};

FeasibilityReport validate_datum(const BLDatum& datum, const FeasibilityOptions& opts = {});

enum class AdjointMode { forward, reverse };

struct AdjointParams {
  std::vector<double> theta;
  double p = 1.0;  // may be +infinity in reverse mode
  std::vector<double> p_i;
  AdjointMode mode = AdjointMode::forward;
  // Present when all inputs were exact rationals and p is finite.
  std::optional<std::vector<Rational>> theta_exact;
  std::optional<Rational> p_exact;
  std::optional<std::vector<Rational>> p_i_exact;

  bool is_identity_case() const { return p == 1.0; }
};

// p_i = 1 / (1 + (c_i/theta_i)(1/p - 1)). Mode is inferred from the sign
// pattern of theta: all positive is forward (needs 0 < p <= 1); exactly one
// positive is reverse (needs p >= 1, p = inf allowed).
AdjointParams derive_adjoint_exponents(const BLDatum& datum, const std::vector<double>& theta,
                                       double p);
AdjointParams derive_adjoint_exponents(const BLDatum& datum, const std::vector<Rational>& theta,
                                       const Rational& p);
// Same relation from the exponents c_i alone.
AdjointParams derive_adjoint_exponents(const std::vector<double>& c, const std::vector<double>& theta,
                                       double p);
AdjointParams derive_adjoint_exponents(const std::vector<Rational>& c, const std::vector<Rational>& theta,
                                       const Rational& p);

// max_i |c_i(1 - 1/p) - theta_i(1 - 1/p_i)|.
double adjoint_exponent_residual(const BLDatum& datum, const AdjointParams& params);

// p^{-d/(2p)} prod_i p_i^{theta_i d_i/(2 p_i)} with 0^0 = inf^0 = 1.
double adjoint_gaussian_prefactor(const AdjointParams& params, const std::vector<std::size_t>& dims,
                                  std::size_t d);

// Named data used throughout tests and scenarios.
namespace data {
BLDatum loomis_whitney(std::size_t d);
BLDatum holder_identity(std::size_t d, std::size_t copies = 1);
BLDatum young();   // R, maps x, y, x - y on R^2, c = (2/3, 2/3, 2/3)
BLDatum finner();  // R^3, maps onto (x1,x2), (x3), (x1), (x2,x3), c = 1/2
}  // namespace data

// Seeded random datum whose gaussian constant is attained (extremizable).
BLDatum random_feasible_datum(std::uint64_t seed, std::size_t index);

}  // namespace blq
