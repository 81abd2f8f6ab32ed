#pragma once

#include <Eigen/Dense>

namespace aniso {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace linalg {

inline constexpr double kRankTol = 1e-12;

/// Orthonormal basis of the column space of A (thin matrix of rank(A) columns).
inline Matrix range_basis(const Matrix& A, double tol = kRankTol) {
  if (A.size() == 0) return Matrix(A.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cutoff = (sv.size() > 0 ? sv(0) : 0.0) * tol;
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff && sv(rank) > 0.0) ++rank;
  return svd.matrixU().leftCols(rank);
}

/// Orthonormal basis of ker(A^T), the orthogonal complement of Ran A in R^rows.
inline Matrix cokernel_basis(const Matrix& A, double tol = kRankTol) {
  const Eigen::Index n = A.rows();
  Matrix B = range_basis(A, tol);
  // Full SVD of B^T: right singular vectors beyond rank(B) span the complement.
  if (B.cols() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(B.transpose(), Eigen::ComputeFullV);
  return svd.matrixV().rightCols(n - B.cols());
}

/// Orthogonal projector onto Ran A.
inline Matrix range_projector(const Matrix& A, double tol = kRankTol) {
  Matrix B = range_basis(A, tol);
  return B * B.transpose();
}

/// Euclidean distance from b to Ran A (least-squares residual norm).
inline double range_distance(const Matrix& A, const Vector& b) {
  if (A.cols() == 0) return b.norm();
  Vector x = A.colPivHouseholderQr().solve(b);
  return (A * x - b).norm();
}

}  // namespace linalg
}  // namespace aniso
