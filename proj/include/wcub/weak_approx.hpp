#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "wcub/expr.hpp"
#include "wcub/formula.hpp"
#include "wcub/path.hpp"
#include "wcub/sde.hpp"

namespace wcub {

inline constexpr int kDefaultSubsteps = 16;
inline constexpr std::uint64_t kDefaultLeafBudget = 1'000'000;

/// Solves dx = sum_i V_i(x) dw^i along a piecewise-linear path: classical
/// RK4 with a fixed number of substeps per linear segment.
Eigen::VectorXd ode_flow(const VectorFieldSystem& sys, const Eigen::VectorXd& x0, const PiecewiseLinearPath& w,
                         int substeps = kDefaultSubsteps);

/// Times t_l = T (1 - (1 - l/k)^gamma), l = 0..k.
struct Partition {
  double horizon = 1.0;
  int steps = 1;
  double gamma = 1.0;
  std::vector<double> times;

  double step(int l) const { return times[static_cast<std::size_t>(l) + 1] - times[static_cast<std::size_t>(l)]; }
};

Partition make_partition(double horizon, int k, double gamma = 1.0);

enum class TreeMode {
  /// Enumerate all n^k leaves of the cubature tree.
  exact,
  /// Draw leaf paths j_1..j_k i.i.d. from the weights.
  sampled,
  /// Push the mean through the per-step affine flow maps. Exact for systems
  /// whose flows are affine and functionals f that are affine.
  affine,
};

std::string to_string(TreeMode m);
TreeMode parse_tree_mode(const std::string& s);

struct TreeEvaluation {
  double value = 0.0;
  TreeMode mode = TreeMode::exact;
  std::uint64_t leaves = 0;       // exact: n^k
  std::uint64_t ode_solves = 0;
  std::uint64_t samples = 0;      // sampled mode
  double stderr_ = 0.0;           // sampled mode
};

/// Leaf budget exceeded in exact mode.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The system or functional is not affine (affine mode).
struct NotAffine : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TreeOptions {
  TreeMode mode = TreeMode::exact;
  /// Exact mode: maximum leaves. Sampled mode: number of samples.
  std::uint64_t budget = kDefaultLeafBudget;
  std::uint64_t seed = 0;
  int substeps = kDefaultSubsteps;
};

/// Approximates E[f(X_T(x0))] by composing the one-step cubature over the
/// partition: sum over leaves of lambda_j1 ... lambda_jk f(X along w_j1 * ... * w_jk),
/// with each path scaled to its subinterval.
TreeEvaluation tree_expectation(const CubatureFormula& formula, const VectorFieldSystem& sys, const Eigen::VectorXd& x0,
                                const Expression& f, const Partition& part, const TreeOptions& opts = {});

struct ConvergenceRow {
  int k = 0;
  double value = 0.0;
  double error = 0.0;
  TreeEvaluation eval;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  /// Least-squares slope of log(error) against log(k) over rows with
  /// positive error; NaN when fewer than two such rows.
  double slope = 0.0;
};

ConvergenceStudy convergence_study(const CubatureFormula& formula, const VectorFieldSystem& sys,
                                   const Eigen::VectorXd& x0, const Expression& f, double horizon,
                                   const std::vector<int>& ks, double gamma, double reference,
                                   const TreeOptions& opts = {});

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace wcub
