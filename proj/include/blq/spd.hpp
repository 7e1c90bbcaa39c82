#pragma once

#include "blq/linalg.hpp"

namespace blq {

// Symmetric positive-definite matrix with its Cholesky factor cached.
// Construction fails with DomainError unless the input is symmetric to 1e-12
// (relative to its largest entry) and every Cholesky pivot is positive.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Matrix& entries);
  static SpdMatrix identity(Eigen::Index n) { return SpdMatrix(Matrix::Identity(n, n)); }
  // Builds L L^T; L must be square with nonzero diagonal.
  static SpdMatrix from_factor(const Matrix& factor);

  const Matrix& matrix() const { return entries_; }
  const Matrix& chol() const { return chol_; }
  Eigen::Index dim() const { return entries_.rows(); }

  double log_det() const;
  double det() const;
  Matrix inverse() const;
  Matrix solve(const Matrix& rhs) const;

 private:
  SpdMatrix(Matrix entries, Matrix chol) : entries_(std::move(entries)), chol_(std::move(chol)) {}
  Matrix entries_;
  Matrix chol_;
};

}  // namespace blq
