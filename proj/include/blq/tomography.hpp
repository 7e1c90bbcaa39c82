#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "blq/grid.hpp"
#include "blq/linalg.hpp"

namespace blq {

// Unit vectors with probability weights.
struct DirectionSet {
  std::vector<Vector> directions;
  std::vector<double> weights;

  DirectionSet() = default;
  // Throws DomainError unless every vector has unit length (1e-9), weights are
  // non-negative and they sum to 1 (1e-12).
  DirectionSet(std::vector<Vector> directions_, std::vector<double> weights_);

  // Deterministic quadrature for normalized surface measure: angles
  // (i + 1/2) pi / count on the half circle for d = 2, Fibonacci points for d = 3.
  static DirectionSet uniform(std::size_t d, std::size_t count);
  // Equally weighted Haar-random directions.
  static DirectionSet random(std::size_t d, std::size_t count, std::uint64_t seed);
  // Equally spaced points on the great circle orthogonal to e_d (d = 3).
  static DirectionSet great_circle(std::size_t count);

  std::size_t size() const { return directions.size(); }
  std::size_t dim() const { return directions.empty() ? 0 : static_cast<std::size_t>(directions[0].size()); }
};

// Weighted k-dimensional subspaces, each given by an orthonormal d x k basis.
struct PlaneSet {
  std::vector<Matrix> bases;
  std::vector<double> weights;

  static PlaneSet lines(const DirectionSet& dirs);
  // Hyperplanes orthogonal to the given normals.
  static PlaneSet hyperplanes(const DirectionSet& normals);
  // Equally weighted Haar-random k-subspaces of R^d (QR of gaussian frames).
  static PlaneSet haar(std::size_t d, std::size_t k, std::size_t count, std::uint64_t seed);

  std::size_t size() const { return bases.size(); }
};

// Transform values on a common offset grid. Frame j covers the affine planes
// center + complement_j * v + span(basis_j), with v the cell centers of `offsets`.
struct TomogramSamples {
  std::size_t k = 0;
  Vector center;
  GridSpec offsets;
  std::vector<Matrix> bases;
  std::vector<Matrix> complements;
  std::vector<double> weights;
  std::vector<std::vector<double>> values;

  // (sum_j w_j sum_v T^q vol)^{1/q}; q = +inf gives the max.
  double lq_norm(double q) const;
  // max_j ||T(j, .)||_{L^r}.
  double sup_lr_norm(double r) const;
  double mass() const { return lq_norm(1.0); }
  // -sum_j w_j sum_v T log T vol, with 0 log 0 = 0.
  double entropy() const;
};

// k-plane integrals with plane samples spaced step_factor * (smallest cell
// width), f read through multilinear interpolation of its cell values with
// zero padding. Requires 1 <= k <= d - 1 and d <= 3.
TomogramSamples kplane_transform(const GridFunction& f, const PlaneSet& planes, double step_factor = 0.5);
// Line integrals; t_resolution is the sample step relative to the cell width (<= 0.5).
TomogramSamples xray_transform(const GridFunction& f, const DirectionSet& dirs, double t_resolution = 0.5);

// CSV rows: direction_index, offset coordinates, value.
void write_tomogram_csv(std::ostream& out, const TomogramSamples& t);

// q with (1/d)(1 - 1/q) = (1/(d-k))(1 - 1/p).
double kplane_exponent(double p, std::size_t d, std::size_t k);

// ||T_k f||_{L^q} - ||f||_p with quadrature estimate from the 2x coarser
// grid. Throws DomainError when (p, q) is off the scaling line by more than 1e-12.
InequalityMargin tomography_lower_bound_margin(const GridFunction& f, double p, double q, std::size_t k,
                                               const PlaneSet& planes);

struct MonotonicityChain {
  std::vector<double> exponents;            // p_k for k = 0..d-1
  std::vector<double> norms;                // ||T_k f||_{p_k}, k = 0 being f itself
  std::vector<InequalityMargin> steps;      // norms[k+1] - norms[k]
  bool holds() const;
};

// d = 3 chain over the Fibonacci lines and the planes orthogonal to them.
MonotonicityChain kplane_monotonicity(const GridFunction& f, double p, std::size_t directions);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

// Monte Carlo of (E |w_1 ^ ... ^ w_d|^{dq(1/p-1)/(d-1)})^{1/(dq)} with w_i
// drawn independently from the weighted directions.
McEstimate restricted_xray_constant(const DirectionSet& mu, double p, double q, std::size_t n_mc,
                                    std::uint64_t seed);

// E_sigma |sin(angle)|^a on the circle: Gamma((a+1)/2) / (sqrt(pi) Gamma(a/2 + 1)).
double sin_moment(double a);

// Expected |w_1 ^ ... ^ w_d|^a over independent uniform unit vectors, as a
// product of Gamma ratios.
double wedge_moment(std::size_t d, double a);
// Constant of the three-norm inequality: wedge_moment(d, 1-q)^{(1-1/p)/((d-1)q)}.
double xx_gamma_constant(std::size_t d, double p, double q);

struct GammaOracle {
  McEstimate wedge_moment;  // from the gaussian integral divided by its radial factor
  double constant = 0.0;
};
// Samples x_1..x_d with density exp(-pi|x|^2), averages |det|^{1-q} and
// divides by the radial factor (Gamma((d+a)/2) / (pi^{a/2} Gamma(d/2)))^d.
GammaOracle xx_gamma_monte_carlo(std::size_t d, double p, double q, std::size_t n_mc, std::uint64_t seed);

// r with (1/q - 1/p)(1 - 1/r) = (1/(d-1))(1 - 1/p)(1/q - 1).
double xx_exponent(std::size_t d, double p, double q);

// rhs - lhs of C ||Xf||_{L^inf L^r}^{1/q-1/p} <= ||f||_p^{1/q-1} ||Xf||_{L^q}^{1-1/p}.
InequalityMargin xx_three_norm_margin(const GridFunction& f, double p, double q, const DirectionSet& dirs);

struct Box2 {
  double x0, y0, x1, y1;
};
// Exact area of a union of axis-parallel rectangles.
double union_area(const std::vector<Box2>& boxes);
// Exact length of the projection of the union onto the line spanned by u.
double projection_length(const std::vector<Box2>& boxes, const Vector& u);
// sum_w weight * |P_w Omega| - |Omega|^{1/2} for a union of boxes in the plane.
double averaged_loomis_whitney_margin(const std::vector<Box2>& boxes, const DirectionSet& dirs);

// H(T_k f) / (d - k) for k = 0..d-1, f normalized to mass 1 first.
// Lines and hyperplanes use DirectionSet::uniform(d, directions).
std::vector<double> kplane_entropy_sequence(const GridFunction& f, std::size_t directions);

// Differential entropy -sum f log f vol of a grid function (not normalized).
double grid_entropy(const GridFunction& f);

}  // namespace blq
