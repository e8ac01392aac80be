#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace wcub {

struct SimplexOptions {
  double pivot_tolerance = 1e-11;
  double optimality_tolerance = 1e-11;
  /// Basic variables below minus this are repaired after the shift is removed.
  double feasibility_tolerance = 1e-14;
  /// Pivots between rebuilds of the tableau from the original data.
  std::size_t refactor_interval = 400;
  /// Pivots without progress before switching to Bland's rule.
  std::size_t degenerate_streak = 50;
  /// 0 selects 20 * (rows + cols).
  std::size_t max_iterations = 0;
  /// Rows of A whose pivot in a column-pivoted QR of A^T falls below this
  /// fraction of the largest are treated as dependent and dropped.
  double row_rank_tolerance = 1e-10;
  /// Relative shift added to the right-hand side while pivoting; the final
  /// basis is re-solved against the unshifted b.
  double perturbation = 1e-7;
};

/// row_certificate: removing the shift exposed a tableau row with negative
/// right-hand side and no way to repair it; dual then holds that row.
enum class Phase1Status { optimal, row_certificate, numerical_failure };

struct Phase1Result {
  Phase1Status status = Phase1Status::optimal;
  /// Basic solution of A x = b, x >= 0 (structural variables only).
  Eigen::VectorXd x;
  /// Sum of the artificial variables left at the optimum.
  double objective = 0.0;
  std::size_t iterations = 0;
  /// Structural columns in the final basis.
  std::vector<Eigen::Index> basic_columns;
  /// Rows of A kept after dropping dependent ones; the caller checks the rest.
  std::vector<Eigen::Index> rows_used;
  /// Phase-one dual y at the optimum (zero on dropped rows). When the
  /// objective is positive, A^T y <= 0 with b^T y > 0 certifies infeasibility.
  Eigen::VectorXd dual;
  std::string message;
};

/**
 * @brief Phase one of the primal simplex method on a dense tableau.
 *
 * Minimises the sum of artificial variables for A x + s = b, x, s >= 0,
 * after dropping rows that are numerically dependent on the others.
 * The right-hand side is shifted by a small row-dependent amount while
 * pivoting, since zero odd moments make the start heavily degenerate.
 * Entering column by Dantzig's rule; once the objective stalls for a streak
 * of pivots the rule falls back to Bland's smallest-index rule.
 * Ties in the ratio test prefer artificial rows, then the smallest basic
 * index. The returned x is a vertex, so its support is at most rank(A).
 */
Phase1Result simplex_phase_one(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const SimplexOptions& opts = {});

}  // namespace wcub
