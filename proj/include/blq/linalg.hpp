#pragma once

#include <Eigen/Dense>
#include <cstddef>

#include "blq/rng.hpp"

namespace blq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct RankInfo {
  std::size_t rank = 0;
  // True when some singular value sits within three decades of the cutoff,
  // i.e. the numerical rank depends on the tolerance choice.
  bool ambiguous = false;
};

// Numerical rank with cutoff rel_tol * (largest singular value).
RankInfo numerical_rank(const Matrix& m, double rel_tol = 1e-10);

// Orthonormal basis (columns) of the column space of m.
Matrix column_space(const Matrix& m, double rel_tol = 1e-10);

// Orthonormal basis (columns) of the null space of m.
Matrix null_space(const Matrix& m, double rel_tol = 1e-10);

// Orthonormal basis of the intersection of two column spans.
Matrix intersect_spans(const Matrix& u, const Matrix& w, double rel_tol = 1e-10);

// rows x cols matrix with orthonormal columns, Haar distributed (QR of a
// gaussian matrix with the sign convention that diag(R) > 0).
Matrix haar_frame(std::size_t rows, std::size_t cols, Rng& rng);

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng);

// exp / log of a symmetric matrix through its eigendecomposition.
Matrix sym_expm(const Matrix& s);
Matrix sym_logm(const Matrix& s);

// Symmetric part (m + m^T) / 2.
inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace blq
