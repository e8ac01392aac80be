#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <vector>

namespace wcub {

/**
 * @brief Continuous piecewise-linear path in R^(d+1) started at the origin.
 *
 * Coordinate 0 is time-like. Segment j covers [breakpoints[j], breakpoints[j+1]]
 * and moves with constant velocity slopes.col(j).
 */
class PiecewiseLinearPath {
public:
  /// Requires breakpoints[0] == 0, strictly increasing breakpoints, and one
  /// slope column per segment.
  PiecewiseLinearPath(std::vector<double> breakpoints, Eigen::MatrixXd slopes);

  /// Builds a path on [0, horizon] with equal-length segments from per-segment
  /// increments (one column per segment).
  static PiecewiseLinearPath from_increments(const Eigen::MatrixXd& increments, double horizon = 1.0);

  /// Equal segments on [0, 1] whose time coordinate is w0(t) = t.
  static PiecewiseLinearPath with_unit_time(const Eigen::MatrixXd& spatial_increments);

  int dim() const { return static_cast<int>(slopes_.rows()) - 1; }
  std::size_t segments() const { return breakpoints_.size() - 1; }
  double horizon() const { return breakpoints_.back(); }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const Eigen::MatrixXd& slopes() const { return slopes_; }
  double segment_length(std::size_t j) const { return breakpoints_[j + 1] - breakpoints_[j]; }
  Eigen::VectorXd increment(std::size_t j) const { return slopes_.col(static_cast<Eigen::Index>(j)) * segment_length(j); }

  Eigen::VectorXd evaluate(double t) const;
  Eigen::VectorXd endpoint() const { return evaluate(horizon()); }

  friend bool operator==(const PiecewiseLinearPath& a, const PiecewiseLinearPath& b) {
    return a.breakpoints_ == b.breakpoints_ && a.slopes_.rows() == b.slopes_.rows() &&
           a.slopes_.cols() == b.slopes_.cols() && a.slopes_ == b.slopes_;
  }

private:
  std::vector<double> breakpoints_;
  Eigen::MatrixXd slopes_;
};

/// Sum over segments of length times the max-coordinate slope magnitude.
double total_variation(const PiecewiseLinearPath& w);

/// Maps a path on [0,1] to [0,T]: time coordinate scaled by T, spatial
/// coordinates by sqrt(T).
PiecewiseLinearPath scale_to_horizon(const PiecewiseLinearPath& w, double horizon);

/// w followed by v (v translated to start at the end of w).
PiecewiseLinearPath concat_paths(const PiecewiseLinearPath& w, const PiecewiseLinearPath& v);

void to_json(nlohmann::json& j, const PiecewiseLinearPath& w);
PiecewiseLinearPath path_from_json(const nlohmann::json& j);

}  // namespace wcub
