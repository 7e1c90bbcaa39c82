#include "blq/ascent.hpp"

#include <cmath>

#include "blq/error.hpp"

namespace blq {
namespace {

double squared_norm(const std::vector<Matrix>& hs) {
  double s = 0.0;
  for (const auto& h : hs) s += h.squaredNorm();
  return s;
}

std::vector<SpdMatrix> move(const std::vector<SpdMatrix>& point, const std::vector<Matrix>& hs,
                            double t) {
  std::vector<SpdMatrix> out;
  out.reserve(point.size());
  for (std::size_t k = 0; k < point.size(); ++k)
    out.push_back(SpdMatrix::from_factor(point[k].chol() * sym_expm(0.5 * t * hs[k])));
  return out;
}

}  // namespace

AscentResult riemannian_ascent(const AscentProblem& problem, std::vector<SpdMatrix> start,
                               const AscentOptions& opts) {
  AscentResult res;
  res.point = std::move(start);
  res.log_value = problem.log_value(res.point);
  double step = opts.initial_step;
  std::size_t stalls = 0;

  for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
    std::vector<Matrix> hs = problem.natural_gradient(res.point);
    double g2 = squared_norm(hs);
    res.grad_norm = std::sqrt(g2);
    if (res.grad_norm < opts.grad_tol) {
      res.converged = true;
      break;
    }
    bool accepted = false;
    for (int halvings = 0; halvings < 80; ++halvings, step *= 0.5) {
      std::vector<SpdMatrix> trial;
      double v;
      try {
        trial = move(res.point, hs, step);
        v = problem.log_value(trial);
      } catch (const DomainError&) {
        continue;
      } catch (const ConditioningError&) {
        continue;
      }
      if (std::isfinite(v) && v >= res.log_value + 1e-4 * step * g2) {
        stalls = v - res.log_value <= 1e-15 * std::max(1.0, std::abs(res.log_value)) ? stalls + 1 : 0;
        res.point = std::move(trial);
        res.log_value = v;
        accepted = true;
        break;
      }
    }
    if (!accepted || stalls > 50) {
      // No ascent direction left at working precision.
      res.converged = res.grad_norm < std::sqrt(opts.grad_tol);
      break;
    }
    if (res.log_value > opts.log_guard) {
      res.diverged = true;
      break;
    }
    step = std::min(step * 2.0, 1e6);
  }
  return res;
}

}  // namespace blq
