#include "blq/spd.hpp"

#include <cmath>

#include "blq/error.hpp"

namespace blq {
namespace {

Matrix cholesky_or_throw(const Matrix& a) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) throw DomainError("matrix is not positive definite");
  Matrix l = llt.matrixL();
  for (Eigen::Index i = 0; i < l.rows(); ++i)
    if (!(l(i, i) > 0.0) || !std::isfinite(l(i, i)))
      throw DomainError("matrix is not positive definite (non-positive Cholesky pivot)");
  return l;
}

}  // namespace

SpdMatrix::SpdMatrix(const Matrix& entries) {
  if (entries.rows() != entries.cols() || entries.rows() == 0)
    throw DomainError("SPD matrix must be square and non-empty");
  if (!entries.allFinite()) throw DomainError("SPD matrix has non-finite entries");
  double scale = entries.cwiseAbs().maxCoeff();
  double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) throw DomainError("matrix is not symmetric");
  entries_ = symmetrize(entries);
  chol_ = cholesky_or_throw(entries_);
}

SpdMatrix SpdMatrix::from_factor(const Matrix& factor) {
  if (factor.rows() != factor.cols()) throw DomainError("Cholesky factor must be square");
  Matrix a = symmetrize(factor * factor.transpose());
  return SpdMatrix(a, cholesky_or_throw(a));
}

double SpdMatrix::log_det() const { return 2.0 * chol_.diagonal().array().log().sum(); }

double SpdMatrix::det() const { return std::exp(log_det()); }

Matrix SpdMatrix::inverse() const {
  return solve(Matrix::Identity(dim(), dim()));
}

Matrix SpdMatrix::solve(const Matrix& rhs) const {
  Matrix y = chol_.triangularView<Eigen::Lower>().solve(rhs);
  return chol_.transpose().triangularView<Eigen::Upper>().solve(y);
}

}  // namespace blq
