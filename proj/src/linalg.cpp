#include "blq/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace blq {

RankInfo numerical_rank(const Matrix& m, double rel_tol) {
  RankInfo info;
  if (m.size() == 0) return info;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return info;
  double cutoff = rel_tol * s(0);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) ++info.rank;
    if (s(i) > cutoff * 1e-3 && s(i) < cutoff * 1e3) info.ambiguous = true;
  }
  return info;
}

Matrix column_space(const Matrix& m, double rel_tol) {
  if (m.cols() == 0) return Matrix(m.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  RankInfo r = numerical_rank(m, rel_tol);
  return svd.matrixU().leftCols(static_cast<Eigen::Index>(r.rank));
}

Matrix null_space(const Matrix& m, double rel_tol) {
  const Eigen::Index n = m.cols();
  if (m.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  RankInfo r = numerical_rank(m, rel_tol);
  const auto rank = static_cast<Eigen::Index>(r.rank);
  return svd.matrixV().rightCols(n - rank);
}

Matrix intersect_spans(const Matrix& u, const Matrix& w, double rel_tol) {
  const Eigen::Index d = u.rows();
  if (u.cols() == 0 || w.cols() == 0) return Matrix(d, 0);
  Matrix uo = column_space(u, rel_tol);
  Matrix wo = column_space(w, rel_tol);
  Matrix stacked(d, uo.cols() + wo.cols());
  stacked << uo, -wo;
  Matrix kernel = null_space(stacked, rel_tol);
  if (kernel.cols() == 0) return Matrix(d, 0);
  return column_space(uo * kernel.topRows(uo.cols()), rel_tol);
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.normal();
  return g;
}

Matrix haar_frame(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix g = gaussian_matrix(rows, cols, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(static_cast<Eigen::Index>(rows),
                                                  static_cast<Eigen::Index>(cols));
  Matrix r = qr.matrixQR().topRows(static_cast<Eigen::Index>(cols)).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

Matrix sym_expm(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(s));
  Vector e = eig.eigenvalues().array().exp();
  return eig.eigenvectors() * e.asDiagonal() * eig.eigenvectors().transpose();
}

Matrix sym_logm(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(s));
  Vector e = eig.eigenvalues().array().log();
  return eig.eigenvectors() * e.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace blq
