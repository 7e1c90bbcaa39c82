#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blq/bl_data.hpp"
#include "blq/spd.hpp"

namespace blq {

struct GaussianPushforward {
  double amplitude;  // sqrt(det A_i / det A)
  SpdMatrix form;    // A_i = (B A^{-1} B^T)^{-1}
};

// Marginal of x -> exp(-pi <Ax,x>) along B: amplitude * exp(-pi <A_i y,y>).
GaussianPushforward gaussian_pushforward(const SpdMatrix& a, const Matrix& b);

struct GaussianOptions {
  double tol = 1e-10;  // relative Frobenius change of A between iterates
  std::size_t max_iter = 10000;
  double overflow_guard = 1e100;
  double damping = 0.5;
  std::size_t ascent_max_iter = 20000;
  double ascent_grad_tol = 1e-9;
};

struct GaussianOptResult {
  double value = 0.0;
  double log_value = 0.0;
  std::vector<SpdMatrix> argmax;
  std::size_t iterations = 0;
  bool converged = false;
  // Value left the overflow guard or the starting matrix was singular: the
  // datum looks infeasible (infinite constant).
  bool diverged = false;
  double residual = 0.0;
  std::string method;
  // Adjoint runs only: prefactor * BLg^{1/p - 1} from the fixed-point route.
  std::optional<double> cross_check;
};

// log of prod det(A_i)^{c_i/2} / det(sum c_i B_i^T A_i B_i)^{1/2}.
double bl_log_objective(const BLDatum& datum, const std::vector<SpdMatrix>& forms);
// Euclidean gradient with respect to each A_i.
std::vector<Matrix> bl_log_objective_gradient(const BLDatum& datum,
                                              const std::vector<SpdMatrix>& forms);

GaussianOptResult bl_gaussian_constant(const BLDatum& datum, const GaussianOptions& opts = {});

// log of det(A)^{1/2 - 1/(2p)} / prod det(A_i)^{theta_i/2 - theta_i/(2p_i)}
// written in the inverse variable S = A^{-1}, so A_i^{-1} = B_i S B_i^T.
double abl_log_objective(const BLDatum& datum, const AdjointParams& params, const SpdMatrix& s);
Matrix abl_log_objective_gradient(const BLDatum& datum, const AdjointParams& params,
                                  const SpdMatrix& s);

GaussianOptResult abl_gaussian_constant(const BLDatum& datum, const AdjointParams& params,
                                        const GaussianOptions& opts = {});

struct IdentityResidual {
  double log_left = 0.0;   // sup over tuples of prod det(A_i)^{c_i} / det(sum c_i B_i^T A_i B_i)
  double log_right = 0.0;  // sup over A of det(A) / prod det(B_i A B_i^T)^{c_i}
  double residual = 0.0;   // |log_left - log_right|
  bool converged_left = false;
  bool converged_right = false;
  std::size_t iterations_left = 0;
  std::size_t iterations_right = 0;
};

IdentityResidual identity_ai_residual(const BLDatum& datum, const GaussianOptions& opts = {});

}  // namespace blq
