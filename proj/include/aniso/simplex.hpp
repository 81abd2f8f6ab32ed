#pragma once

#include <cstddef>
#include <vector>

#include "aniso/errors.hpp"
#include "aniso/linalg.hpp"

namespace aniso {

/// Dense tableau simplex for the small LPs of this library:
///
///   maximize c.x  subject to  A x <= b,  x >= 0,  with b >= 0,
///
/// so x = 0 is feasible and no phase-1 is needed. Bland's smallest-index rule
/// for both the entering and the leaving variable (anti-cycling). Problem
/// sizes here are a handful of rows/columns, so the dense tableau is fine.
class SimplexSolver {
 public:
  struct Result {
    double objective = 0.0;
    Vector x;
    bool unbounded = false;
  };

  static constexpr double kEps = 1e-11;

  static Result maximize(const Matrix& A, const Vector& b, const Vector& c) {
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    for (Eigen::Index i = 0; i < m; ++i)
      if (b(i) < -kEps) throw infeasible_error("simplex: negative right-hand side");

    // Tableau: m constraint rows + objective row; n structural + m slack columns + rhs.
    Matrix T = Matrix::Zero(m + 1, n + m + 1);
    T.block(0, 0, m, n) = A;
    T.block(0, n, m, m) = Matrix::Identity(m, m);
    T.col(n + m).head(m) = b.cwiseMax(0.0);
    T.row(m).head(n) = -c.transpose();

    std::vector<Eigen::Index> basis(m);
    for (Eigen::Index i = 0; i < m; ++i) basis[i] = n + i;

    while (true) {
      // Entering variable: smallest index with negative reduced cost.
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < n + m; ++j) {
        if (T(m, j) < -kEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) break;  // optimal

      // Leaving variable: min ratio, ties by smallest basis index.
      Eigen::Index leave = -1;
      double best_ratio = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (T(i, enter) > kEps) {
          const double ratio = T(i, n + m) / T(i, enter);
          if (leave < 0 || ratio < best_ratio - kEps ||
              (ratio < best_ratio + kEps && basis[i] < basis[leave])) {
            leave = i;
            best_ratio = ratio;
          }
        }
      }
      if (leave < 0) {
        Result res;
        res.unbounded = true;
        return res;
      }
      pivot(T, basis, leave, enter);
    }

    Result res;
    res.x = Vector::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i)
      if (basis[i] < n) res.x(basis[i]) = T(i, n + m);
    res.objective = T(m, n + m);
    return res;
  }

 private:
  static void pivot(Matrix& T, std::vector<Eigen::Index>& basis, Eigen::Index row,
                    Eigen::Index col) {
    T.row(row) /= T(row, col);
    for (Eigen::Index i = 0; i < T.rows(); ++i) {
      if (i != row && std::abs(T(i, col)) > 0.0) T.row(i) -= T(i, col) * T.row(row);
    }
    basis[row] = col;
  }
};

}  // namespace aniso
