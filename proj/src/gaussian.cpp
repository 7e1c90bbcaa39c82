#include "blq/gaussian.hpp"

#include <cmath>
#include <limits>

#include "blq/ascent.hpp"
#include "blq/error.hpp"

namespace blq {
namespace {

constexpr double kConditionLimit = 1e13;

SpdMatrix spd_or_conditioning(const Matrix& m, const char* what) {
  try {
    return SpdMatrix(symmetrize(m));
  } catch (const DomainError&) {
    throw ConditioningError(std::string(what) + " is not numerically positive definite");
  }
}

void require_scaling(const BLDatum& datum) {
  double s = 0.0;
  for (std::size_t i = 0; i < datum.k(); ++i) s += datum.c(i) * static_cast<double>(datum.dim(i));
  if (std::abs(s - static_cast<double>(datum.ambient_dim())) > 1e-9)
    throw DomainError("scaling condition d = sum c_i d_i fails (sum is " + std::to_string(s) + ")");
}

Matrix weighted_sum(const BLDatum& datum, const std::vector<Matrix>& forms) {
  const auto d = static_cast<Eigen::Index>(datum.ambient_dim());
  Matrix m = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < datum.k(); ++i)
    m += datum.c(i) * datum.map(i).transpose() * forms[i] * datum.map(i);
  return symmetrize(m);
}

std::vector<Matrix> as_matrices(const std::vector<SpdMatrix>& forms) {
  std::vector<Matrix> out;
  for (const auto& f : forms) out.push_back(f.matrix());
  return out;
}

// One fixed-point evaluation: the tuple induced by A, the next A, and the
// objective at that tuple.
struct FixedPointEval {
  std::vector<SpdMatrix> forms;
  Matrix next;
  double log_value;
};

FixedPointEval evaluate_fixed_point(const BLDatum& datum, const Matrix& a) {
  SpdMatrix as = spd_or_conditioning(a, "fixed-point iterate");
  Matrix ainv = as.inverse();
  FixedPointEval ev;
  double log_num = 0.0;
  std::vector<Matrix> mats;
  for (std::size_t i = 0; i < datum.k(); ++i) {
    const Matrix& b = datum.map(i);
    SpdMatrix marg = spd_or_conditioning(b * ainv * b.transpose(), "B A^{-1} B^T");
    Matrix ai = symmetrize(marg.inverse());
    log_num += 0.5 * datum.c(i) * (-marg.log_det());
    mats.push_back(ai);
    ev.forms.push_back(SpdMatrix(ai));
  }
  ev.next = weighted_sum(datum, mats);
  SpdMatrix next = spd_or_conditioning(ev.next, "sum c_i B_i^T A_i B_i");
  ev.log_value = log_num - 0.5 * next.log_det();
  return ev;
}

double relative_change(const Matrix& next, const Matrix& cur) {
  return (next - cur).norm() / cur.norm();
}

}  // namespace

GaussianPushforward gaussian_pushforward(const SpdMatrix& a, const Matrix& b) {
  if (b.cols() != a.dim()) throw DomainError("map and matrix dimensions differ");
  RankInfo r = numerical_rank(b);
  if (r.rank < static_cast<std::size_t>(b.rows()))
    throw NotSurjectiveError(0, r.rank, static_cast<std::size_t>(b.rows()));
  Matrix marg = symmetrize(b * a.inverse() * b.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(marg);
  double lo = eig.eigenvalues().minCoeff();
  double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kConditionLimit)
    throw ConditioningError("B A^{-1} B^T is near-singular (condition " + std::to_string(hi / lo) +
                            ")");
  SpdMatrix marg_spd(marg);
  SpdMatrix form(symmetrize(marg_spd.inverse()));
  double amplitude = std::exp(0.5 * (form.log_det() - a.log_det()));
  return {amplitude, form};
}

double bl_log_objective(const BLDatum& datum, const std::vector<SpdMatrix>& forms) {
  double v = 0.0;
  for (std::size_t i = 0; i < datum.k(); ++i) v += 0.5 * datum.c(i) * forms[i].log_det();
  SpdMatrix m = spd_or_conditioning(weighted_sum(datum, as_matrices(forms)), "sum c_i B_i^T A_i B_i");
  return v - 0.5 * m.log_det();
}

std::vector<Matrix> bl_log_objective_gradient(const BLDatum& datum,
                                              const std::vector<SpdMatrix>& forms) {
  SpdMatrix m = spd_or_conditioning(weighted_sum(datum, as_matrices(forms)), "sum c_i B_i^T A_i B_i");
  Matrix minv = m.inverse();
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < datum.k(); ++i) {
    const Matrix& b = datum.map(i);
    out.push_back(0.5 * datum.c(i) * symmetrize(forms[i].inverse() - b * minv * b.transpose()));
  }
  return out;
}

GaussianOptResult bl_gaussian_constant(const BLDatum& datum, const GaussianOptions& opts) {
  datum.require_surjective();
  require_scaling(datum);
  GaussianOptResult res;
  res.method = "fixed-point";
  const double log_guard = std::log(opts.overflow_guard);

  std::vector<Matrix> identity_forms;
  for (std::size_t i = 0; i < datum.k(); ++i)
    identity_forms.push_back(Matrix::Identity(static_cast<Eigen::Index>(datum.dim(i)),
                                              static_cast<Eigen::Index>(datum.dim(i))));
  Matrix a = weighted_sum(datum, identity_forms);

  FixedPointEval cur;
  try {
    cur = evaluate_fixed_point(datum, a);
  } catch (const ConditioningError&) {
    // The kernels share a nonzero vector: the constant is infinite.
    res.diverged = true;
    res.value = std::numeric_limits<double>::infinity();
    res.log_value = res.value;
    return res;
  }

  for (res.iterations = 1; res.iterations <= opts.max_iter; ++res.iterations) {
    res.residual = relative_change(cur.next, a);
    if (res.residual < opts.tol) {
      res.converged = true;
      break;
    }
    Matrix cand_a = cur.next;
    FixedPointEval cand;
    double delta = 1.0;
    bool ok = false;
    for (int halvings = 0; halvings < 40; ++halvings) {
      try {
        cand = evaluate_fixed_point(datum, cand_a);
        ok = true;
      } catch (const ConditioningError&) {
        ok = false;
      }
      const double slack = 1e-13 * std::max(1.0, std::abs(cur.log_value));
      if (ok && cand.log_value >= cur.log_value - slack) break;
      delta *= opts.damping;
      cand_a = a + delta * (cur.next - a);
    }
    if (!ok) break;
    a = cand_a;
    cur = std::move(cand);
    if (cur.log_value > log_guard) {
      res.diverged = true;
      break;
    }
  }
  if (res.iterations > opts.max_iter) res.iterations = opts.max_iter;
  res.log_value = cur.log_value;
  res.argmax = cur.forms;

  if (!res.converged && !res.diverged) {
    AscentProblem prob;
    prob.log_value = [&](const std::vector<SpdMatrix>& f) { return bl_log_objective(datum, f); };
    prob.natural_gradient = [&](const std::vector<SpdMatrix>& f) {
      std::vector<Matrix> g = bl_log_objective_gradient(datum, f);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = f[i].chol().transpose() * g[i] * f[i].chol();
      return g;
    };
    AscentOptions ao;
    ao.grad_tol = opts.ascent_grad_tol;
    ao.max_iter = opts.ascent_max_iter;
    ao.log_guard = log_guard;
    AscentResult asc = riemannian_ascent(prob, cur.forms, ao);
    res.method = "fixed-point+ascent";
    res.iterations += asc.iterations;
    if (asc.log_value >= res.log_value) {
      res.log_value = asc.log_value;
      res.argmax = asc.point;
    }
    res.diverged = asc.diverged;
    res.converged = asc.converged;
    res.residual = asc.grad_norm;
  }
  res.value = std::exp(res.log_value);
  return res;
}

double abl_log_objective(const BLDatum& datum, const AdjointParams& params, const SpdMatrix& s) {
  const double alpha = 0.5 - 0.5 / params.p;
  double v = -alpha * s.log_det();
  for (std::size_t i = 0; i < datum.k(); ++i) {
    const Matrix& b = datum.map(i);
    double beta = params.theta[i] * (0.5 - 0.5 / params.p_i[i]);
    SpdMatrix marg = spd_or_conditioning(b * s.matrix() * b.transpose(), "B S B^T");
    v += beta * marg.log_det();
  }
  return v;
}

Matrix abl_log_objective_gradient(const BLDatum& datum, const AdjointParams& params,
                                  const SpdMatrix& s) {
  const double alpha = 0.5 - 0.5 / params.p;
  Matrix g = -alpha * s.inverse();
  for (std::size_t i = 0; i < datum.k(); ++i) {
    const Matrix& b = datum.map(i);
    double beta = params.theta[i] * (0.5 - 0.5 / params.p_i[i]);
    SpdMatrix marg = spd_or_conditioning(b * s.matrix() * b.transpose(), "B S B^T");
    g += beta * b.transpose() * marg.inverse() * b;
  }
  return symmetrize(g);
}

GaussianOptResult abl_gaussian_constant(const BLDatum& datum, const AdjointParams& params,
                                        const GaussianOptions& opts) {
  datum.require_surjective();
  require_scaling(datum);
  if (params.theta.size() != datum.k()) throw DomainError("params do not match datum");
  GaussianOptResult res;
  res.method = "ascent";
  const auto d = static_cast<Eigen::Index>(datum.ambient_dim());
  if (params.p == 1.0) {
    res.value = 1.0;
    res.converged = true;
    res.argmax.push_back(SpdMatrix::identity(d));
    res.cross_check = 1.0;
    res.method = "identity";
    return res;
  }
  if (params.mode != AdjointMode::forward || params.p > 1.0)
    throw DomainError("adjoint gaussian constant needs forward mode with p < 1");

  const double prefactor = adjoint_gaussian_prefactor(params, datum.dims(), datum.ambient_dim());
  AscentProblem prob;
  prob.log_value = [&](const std::vector<SpdMatrix>& s) { return abl_log_objective(datum, params, s[0]); };
  prob.natural_gradient = [&](const std::vector<SpdMatrix>& s) {
    Matrix g = abl_log_objective_gradient(datum, params, s[0]);
    return std::vector<Matrix>{s[0].chol().transpose() * g * s[0].chol()};
  };
  AscentOptions ao;
  ao.grad_tol = opts.ascent_grad_tol;
  ao.max_iter = opts.ascent_max_iter;
  ao.log_guard = std::log(opts.overflow_guard);
  AscentResult asc = riemannian_ascent(prob, {SpdMatrix::identity(d)}, ao);

  res.iterations = asc.iterations;
  res.converged = asc.converged;
  res.diverged = asc.diverged;
  res.residual = asc.grad_norm;
  res.log_value = std::log(prefactor) + asc.log_value;
  res.value = std::exp(res.log_value);
  // Report the optimizer in the A variable.
  res.argmax.push_back(SpdMatrix(symmetrize(asc.point[0].inverse())));

  GaussianOptResult bl = bl_gaussian_constant(datum, opts);
  res.cross_check = prefactor * std::exp((1.0 / params.p - 1.0) * bl.log_value);
  return res;
}

IdentityResidual identity_ai_residual(const BLDatum& datum, const GaussianOptions& opts) {
  datum.require_surjective();
  require_scaling(datum);
  AscentOptions ao;
  ao.grad_tol = opts.ascent_grad_tol;
  ao.max_iter = opts.ascent_max_iter;
  ao.log_guard = 2.0 * std::log(opts.overflow_guard);

  AscentProblem left;
  left.log_value = [&](const std::vector<SpdMatrix>& f) {
    double v = 0.0;
    for (std::size_t i = 0; i < datum.k(); ++i) v += datum.c(i) * f[i].log_det();
    SpdMatrix m = spd_or_conditioning(weighted_sum(datum, as_matrices(f)), "sum c_i B_i^T A_i B_i");
    return v - m.log_det();
  };
  left.natural_gradient = [&](const std::vector<SpdMatrix>& f) {
    SpdMatrix m = spd_or_conditioning(weighted_sum(datum, as_matrices(f)), "sum c_i B_i^T A_i B_i");
    Matrix minv = m.inverse();
    std::vector<Matrix> hs;
    for (std::size_t i = 0; i < datum.k(); ++i) {
      const Matrix& l = f[i].chol();
      const Matrix& b = datum.map(i);
      Matrix h = Matrix::Identity(l.rows(), l.cols()) - l.transpose() * b * minv * b.transpose() * l;
      hs.push_back(datum.c(i) * symmetrize(h));
    }
    return hs;
  };
  std::vector<SpdMatrix> start_left;
  for (std::size_t i = 0; i < datum.k(); ++i)
    start_left.push_back(SpdMatrix::identity(static_cast<Eigen::Index>(datum.dim(i))));

  AscentProblem right;
  right.log_value = [&](const std::vector<SpdMatrix>& a) {
    double v = a[0].log_det();
    for (std::size_t i = 0; i < datum.k(); ++i) {
      const Matrix& b = datum.map(i);
      v -= datum.c(i) * spd_or_conditioning(b * a[0].matrix() * b.transpose(), "B A B^T").log_det();
    }
    return v;
  };
  right.natural_gradient = [&](const std::vector<SpdMatrix>& a) {
    const Matrix& l = a[0].chol();
    Matrix h = Matrix::Identity(l.rows(), l.cols());
    for (std::size_t i = 0; i < datum.k(); ++i) {
      Matrix bl = datum.map(i) * l;
      SpdMatrix marg = spd_or_conditioning(bl * bl.transpose(), "B A B^T");
      h -= datum.c(i) * bl.transpose() * marg.solve(bl);
    }
    return std::vector<Matrix>{symmetrize(h)};
  };
  const auto d = static_cast<Eigen::Index>(datum.ambient_dim());

  IdentityResidual out;
  AscentResult l = riemannian_ascent(left, start_left, ao);
  AscentResult r = riemannian_ascent(right, {SpdMatrix::identity(d)}, ao);
  out.log_left = l.log_value;
  out.log_right = r.log_value;
  out.residual = std::abs(l.log_value - r.log_value);
  out.converged_left = l.converged;
  out.converged_right = r.converged;
  out.iterations_left = l.iterations;
  out.iterations_right = r.iterations;
  return out;
}

}  // namespace blq
