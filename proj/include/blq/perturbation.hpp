#pragma once

#include <cstddef>

#include "blq/bl_data.hpp"
#include "blq/grid.hpp"

namespace blq {

struct PerturbationGap {
  double coefficient = 0.0;      // first variation of log ||f||_p - sum theta_i log ||f_i||_{p_i} along h
  double self_estimate = 0.0;    // |coefficient(grid) - coefficient(grid coarsened once)|
  double lower_bound = 0.0;      // p^{d/2} * integral of exp(-pi p |x|^2) over the perturbed region
  double radius = 0.0;           // R
  double cone_ratio = 0.0;       // cone is <P_j x, x> >= cone_ratio |x|^2
  std::size_t index = 0;         // j
  double finite_difference = 0.0;  // (Phi(f + eps h) - Phi(f)) / eps on the grid
};

// Perturbs the standard gaussian f = exp(-pi|x|^2) by h = -f on the part of
// the cone around the row space of B_j lying outside the ball of radius R,
// with j the admissible index (theta_j < c_j) of smallest R. A positive
// coefficient means the gaussian is not a local maximizer of the adjoint ratio.
// Throws ResolutionError when the coarse-grid self-estimate exceeds 10% of
// the coefficient.
PerturbationGap perturbation_gap(const BLDatum& datum, const AdjointParams& params, double eps,
                                 const GridSpec& grid);

}  // namespace blq
