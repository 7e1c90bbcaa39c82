#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "blq/spd.hpp"

namespace blq {

// Maximizes a smooth function of a tuple of SPD matrices by gradient ascent in
// the affine-invariant geometry. Each block is moved along
//   A(t) = L exp(t H) L^T,   H = L^T G L,
// where A = L L^T and G is the Euclidean gradient; the new Cholesky factor is
// recomputed from L exp(tH/2). Step sizes come from Armijo backtracking and
// grow again after every accepted step.
struct AscentProblem {
  std::function<double(const std::vector<SpdMatrix>&)> log_value;
  // Returns H_k = L_k^T G_k L_k for each block.
  std::function<std::vector<Matrix>(const std::vector<SpdMatrix>&)> natural_gradient;
};

struct AscentOptions {
  double grad_tol = 1e-9;  // stop when sqrt(sum ||H_k||_F^2) falls below this
  std::size_t max_iter = 20000;
  double initial_step = 0.5;
  double log_guard = 230.0;  // about log(1e100)
};

struct AscentResult {
  std::vector<SpdMatrix> point;
  double log_value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool diverged = false;
  double grad_norm = 0.0;
};

AscentResult riemannian_ascent(const AscentProblem& problem, std::vector<SpdMatrix> start,
                               const AscentOptions& opts = {});

}  // namespace blq
