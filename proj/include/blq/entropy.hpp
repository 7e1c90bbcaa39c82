#pragma once

#include <functional>
#include <vector>

#include "blq/bl_data.hpp"
#include "blq/grid.hpp"

namespace blq {

// Non-negative weights on a finite index set together with the reference
// measure of each atom (1 for counting measure, the cell volume for grids).
struct DiscreteDensity {
  std::vector<double> weights;
  std::vector<double> measure;

  DiscreteDensity() = default;
  // Counting measure.
  explicit DiscreteDensity(std::vector<double> weights_);
  DiscreteDensity(std::vector<double> weights_, std::vector<double> measure_);
  static DiscreteDensity from_grid(const GridFunction& f);

  double mass() const;
  // Throws DomainError on zero mass.
  DiscreteDensity normalized() const;
  // f^p / ||f||_p^p.
  DiscreteDensity escort(double p) const;
};

// -sum f log f mu after normalization, 0 log 0 = 0.
double shannon_entropy(const DiscreteDensity& f);
// (p/(1-p)) log ||f||_p after normalization; p = 1 gives the Shannon entropy.
double renyi_entropy(const DiscreteDensity& f, double p);
double renyi_entropy(const GridFunction& f, double p);

// Variance of log g under g = f^p/||f||_p^p; equals -p dH(g)/dp.
double escort_log_variance(const DiscreteDensity& f, double p);

struct EntropicMargin {
  double value = 0.0;               // sum c_i H(f_i) + log bl - H(f)
  double quadrature_estimate = 0.0;  // |value - value on the 2x coarser grids|
  bool holds(double tol) const { return value >= -tol - quadrature_estimate; }
};

// Shannon form of the subadditivity inequality for a grid density (normalized
// internally). Pushforward grids follow matched_image_grid.
EntropicMargin entropic_bl_margin(const GridFunction& f, const BLDatum& datum, double bl_value);

// Renyi form sum c_i H_{p_i}(f_i) + log bl - H_p(f) with p_i from theta.
double renyi_bl_margin(const GridFunction& f, const BLDatum& datum, const std::vector<double>& theta, double p,
                       double bl_value);

struct RenyiConvergence {
  double shannon_margin = 0.0;
  std::vector<double> eps;
  std::vector<double> margins;  // at p = 1 - eps
  std::vector<double> slopes;   // (margin - shannon_margin) / eps
  // Largest relative disagreement between consecutive slopes.
  double slope_spread() const;
};
RenyiConvergence renyi_convergence(const GridFunction& f, const BLDatum& datum, const std::vector<double>& theta,
                                   double bl_value, const std::vector<double>& eps);

// H(f^p/||f||_p^p) - sum c_i H(f_i^{p_i}/||f_i||^{p_i}) - log bl. Non-positive
// for indicators; unsigned in general.
double p_entropy_probe(const GridFunction& f, const BLDatum& datum, const std::vector<double>& theta, double p,
                       double bl_value);

// log of ||f||_p / (bl^{1/p-1} prod ||f_i||_{p_i}^{theta_i}) and the closed
// form of p^2 d/dp of it.
double log_adjoint_ratio(const GridFunction& f, const BLDatum& datum, const std::vector<double>& theta, double p,
                         double bl_value);
double log_adjoint_ratio_derivative(const GridFunction& f, const BLDatum& datum, const std::vector<double>& theta,
                                    double p, double bl_value);

// Second derivative by Ridders' extrapolation of central differences in long
// double; error_out receives the extrapolation error estimate.
long double ridders_second_derivative(const std::function<long double(long double)>& fn, long double x,
                                      long double h0, long double* error_out = nullptr);

// q^2 / (1 + q)^2 and its closed-form second derivative (2 - 4q) / (1 + q)^4.
long double escort_curvature_profile(long double q);
long double escort_curvature_exact(long double q);

// 1/2 (H(g^{p1}) + H(g^{p2})) - H(g^p) for escorts of g, with p/(1-p) the
// midpoint of p1/(1-p1) = q - delta and p2/(1-p2) = q + delta. A negative
// value violates the three-variable tensor inequality.
double tensor_escort_margin(const DiscreteDensity& g, double q, double delta);

}  // namespace blq
