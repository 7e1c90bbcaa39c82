#include "blq/perturbation.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "blq/error.hpp"
#include "blq/parallel.hpp"

namespace blq {
namespace {

using std::numbers::pi;

struct Setup {
  std::vector<Matrix> projections;
  std::vector<double> weights;  // theta_i p_i^{d_i/2}
  std::vector<double> p_i;
  double p = 0.0;
  double d = 0.0;
  std::size_t j = 0;
  double radius2 = 0.0;
  double cone = 0.0;
};

bool in_region(const Setup& s, const Vector& x) {
  double r2 = x.squaredNorm();
  if (r2 <= s.radius2) return false;
  return x.dot(s.projections[s.j] * x) >= s.cone * r2;
}

struct Terms {
  double variation;   // h * (f^{p-1}/||f||_p^p - sum theta_i f_i(B_i x)^{p_i-1}/||f_i||^{p_i}) with h = -f
  double comparison;  // p^{d/2} exp(-pi p |x|^2)
};

Terms terms_at(const Setup& s, const Vector& x) {
  double r2 = x.squaredNorm();
  double comparison = std::pow(s.p, s.d / 2.0) * std::exp(-pi * s.p * r2);
  double weighted = 0.0;
  for (std::size_t i = 0; i < s.weights.size(); ++i) {
    double q = x.dot(s.projections[i] * x);
    weighted += s.weights[i] * std::exp(-pi * r2 - pi * (s.p_i[i] - 1.0) * q);
  }
  return {weighted - comparison, comparison};
}

std::pair<double, double> integrate(const Setup& s, const GridSpec& grid) {
  const double vol = grid.cell_volume();
  std::vector<double> var(grid.size()), cmp(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    Vector x = grid.point(i);
    if (!in_region(s, x)) {
      var[i] = cmp[i] = 0.0;
      return;
    }
    Terms t = terms_at(s, x);
    var[i] = t.variation;
    cmp[i] = t.comparison;
  });
  double a = deterministic_sum(var.size(), [&](std::size_t i) { return var[i]; });
  double b = deterministic_sum(cmp.size(), [&](std::size_t i) { return cmp[i]; });
  return {a * vol, b * vol};
}

double log_ratio(const GridFunction& u, const BLDatum& datum, const AdjointParams& params,
                 const std::vector<GridSpec>& targets) {
  double v = std::log(lp_norm(u, params.p));
  for (std::size_t i = 0; i < datum.k(); ++i) {
    GridFunction ui = grid_pushforward(u, datum.map(i), targets[i], deposit_subsamples(u.spec(), targets[i]));
    v -= params.theta[i] * std::log(lp_norm(ui, params.p_i[i]));
  }
  return v;
}

}  // namespace

PerturbationGap perturbation_gap(const BLDatum& datum, const AdjointParams& params, double eps,
                                 const GridSpec& grid) {
  datum.require_surjective();
  if (params.mode != AdjointMode::forward) throw DomainError("perturbation gap needs forward mode");
  if (params.p >= 1.0) throw DomainError("perturbation gap needs p < 1 (p = 1 is an identity)");
  if (grid.dim() != datum.ambient_dim()) throw DomainError("grid dimension does not match datum");
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("eps must lie in (0, 1]");

  Setup s;
  s.p = params.p;
  s.p_i = params.p_i;
  s.d = static_cast<double>(datum.ambient_dim());
  for (std::size_t i = 0; i < datum.k(); ++i) {
    const Matrix& b = datum.map(i);
    Matrix gram = b * b.transpose();
    s.projections.push_back(symmetrize(b.transpose() * gram.llt().solve(b)));
    s.weights.push_back(params.theta[i] * std::pow(params.p_i[i], static_cast<double>(datum.dim(i)) / 2.0));
  }

  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t i = 0; i < datum.k(); ++i) {
    if (!(params.theta[i] < datum.c(i))) continue;
    double di = static_cast<double>(datum.dim(i));
    double log_gap = std::log(2.0) + (s.d / 2.0) * std::log(s.p) - std::log(params.theta[i]) -
                     (di / 2.0) * std::log(params.p_i[i]);
    double r2 = std::max(0.0, 2.0 * log_gap / (pi * (s.p - params.p_i[i])));
    if (r2 < best) {
      best = r2;
      s.j = i;
      found = true;
    }
  }
  if (!found) throw DomainError("no index with theta_j < c_j: theta = c has no perturbation gap");
  s.radius2 = best;
  s.cone = (1.0 - 0.5 * (s.p + params.p_i[s.j])) / (1.0 - params.p_i[s.j]);

  PerturbationGap out;
  out.index = s.j;
  out.radius = std::sqrt(s.radius2);
  out.cone_ratio = s.cone;
  auto [coef, lower] = integrate(s, grid);
  auto [coef_coarse, lower_coarse] = integrate(s, grid.coarsened());
  (void)lower_coarse;
  out.coefficient = coef;
  out.lower_bound = lower;
  out.self_estimate = std::abs(coef - coef_coarse);
  if (out.self_estimate > 0.1 * std::abs(coef))
    throw ResolutionError("perturbation coefficient " + std::to_string(coef) + " has self-estimate " +
                          std::to_string(out.self_estimate) + " above 10%; refine the grid");

  GridFunction f = GridFunction::sample(grid, [](const Vector& x) { return std::exp(-pi * x.squaredNorm()); });
  GridFunction g = GridFunction::sample(grid, [&](const Vector& x) {
    double v = std::exp(-pi * x.squaredNorm());
    return in_region(s, x) ? (1.0 - eps) * v : v;
  });
  std::vector<GridSpec> targets;
  for (std::size_t i = 0; i < datum.k(); ++i) targets.push_back(matched_image_grid(grid, datum.map(i)));
  out.finite_difference = (log_ratio(g, datum, params, targets) - log_ratio(f, datum, params, targets)) / eps;
  return out;
}

}  // namespace blq
