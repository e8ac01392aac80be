#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "wcub/formula.hpp"
#include "wcub/moments.hpp"
#include "wcub/path.hpp"
#include "wcub/sampler.hpp"
#include "wcub/simplex.hpp"

namespace wcub {

inline constexpr double kFeasibilityTolerance = 1e-9;

/// Moment-matching feasibility problem Phi lambda = b, lambda >= 0.
struct LpInstance {
  BasisPtr basis;
  /// Signature matrix, one column per candidate path (unscaled).
  Eigen::MatrixXd signatures;
  /// Target moments (unscaled).
  Eigen::VectorXd target;
  /// Row i of the scaled system is divided by row_scale[i] (its max |entry|).
  Eigen::VectorXd row_scale;
  /// Always ones: after row scaling every column has max |entry| 1 at the
  /// empty-word row. Kept so callers see the full scaling of the system.
  Eigen::VectorXd col_scale;
  double epsilon = kFeasibilityTolerance;

  Eigen::MatrixXd scaled_matrix() const;
  Eigen::VectorXd scaled_target() const;
  Eigen::Index rows() const { return signatures.rows(); }
  Eigen::Index cols() const { return signatures.cols(); }
};

LpInstance build_instance(const std::vector<PiecewiseLinearPath>& paths, const BasisPtr& basis, const MomentVector& b,
                          double epsilon = kFeasibilityTolerance);

/// Builds an instance straight from a signature matrix (columns = candidates).
LpInstance build_instance(Eigen::MatrixXd signatures, const MomentVector& b, double epsilon = kFeasibilityTolerance);

enum class LpStatus { feasible, infeasible, numerical_failure };

std::string to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  Eigen::VectorXd weights;
  /// Max-norm of the scaled residual Phi lambda - b.
  double residual = 0.0;
  /// Phase-one objective (sum of artificials) at termination.
  double objective = 0.0;
  std::size_t iterations = 0;
  std::string message;

  std::vector<Eigen::Index> support() const;
};

/**
 * Decides feasibility with phase-one simplex and returns a basic feasible
 * solution. Declared infeasible iff the phase-one objective exceeds
 * epsilon * sqrt(rows). The vertex is polished by a least-squares solve on
 * its support, kept only if it stays nonnegative and lowers the residual.
 */
LpSolution solve_feasibility(const LpInstance& inst, const SimplexOptions& opts = {});

/// Numerical rank failure while reducing a weighting.
struct ReductionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Reduction {
  std::vector<Eigen::Index> kept;  // indices into the input columns
  Eigen::VectorXd weights;         // weights of kept columns
  std::size_t steps = 0;
  double residual = 0.0;  // max-norm, scaled rows
};

/**
 * Caratheodory-Tchakaloff reduction: while the supporting columns are
 * linearly dependent, move the weights along a null vector until one of
 * them vanishes. Each step may add at most epsilon to the residual;
 * violations throw ReductionError.
 */
Reduction caratheodory_reduce(const LpInstance& inst, const Eigen::VectorXd& weights, double rank_tolerance = 1e-10);

/// Moment mismatch of a formula against exact moments: max over words of
/// |sum_j lambda_j I^a(w_j) - E I^a(B)|, plus the same split by degree.
struct MomentCheck {
  double max_residual = 0.0;
  std::vector<double> per_degree;  // index = degree, 0..m
};
MomentCheck check_moments(const CubatureFormula& f);

/// The 2^d single-segment paths t(1, z), z in {-1, 1}^d, with weights 2^-d.
CubatureFormula degree3_formula(int d);

struct ConstructionConfig {
  int d = 2;
  int m = 3;
  SamplerConfig sampler;  // d is overwritten from above
  std::size_t candidates = 0;  // N
  double epsilon = kFeasibilityTolerance;
};

struct ConstructionResult {
  LpStatus status = LpStatus::infeasible;
  std::optional<CubatureFormula> formula;
  double objective = 0.0;
  std::size_t iterations = 0;
  std::string message;
};

/// Sample N candidates, solve the LP, reduce, and verify from scratch. A
/// formula is returned only if its recomputed residual is at most 2 epsilon.
ConstructionResult construct_formula(const ConstructionConfig& cfg);

}  // namespace wcub
