#include "wcub/path.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wcub {

PiecewiseLinearPath::PiecewiseLinearPath(std::vector<double> breakpoints, Eigen::MatrixXd slopes)
    : breakpoints_(std::move(breakpoints)), slopes_(std::move(slopes)) {
  if (breakpoints_.size() < 2) throw std::invalid_argument("path needs at least one segment");
  if (breakpoints_.front() != 0.0) throw std::invalid_argument("path must start at time 0");
  for (std::size_t j = 1; j < breakpoints_.size(); ++j)
    if (!(breakpoints_[j] > breakpoints_[j - 1]))
      throw std::invalid_argument("path breakpoints must be strictly increasing");
  if (slopes_.cols() != static_cast<Eigen::Index>(breakpoints_.size() - 1))
    throw std::invalid_argument("path needs one slope column per segment");
  if (slopes_.rows() < 2) throw std::invalid_argument("path slopes need a time row and at least one spatial row");
  if (!slopes_.allFinite()) throw std::invalid_argument("path slopes must be finite");
}

PiecewiseLinearPath PiecewiseLinearPath::from_increments(const Eigen::MatrixXd& increments, double horizon) {
  if (!(horizon > 0.0)) throw std::invalid_argument("path horizon must be positive");
  const auto n = static_cast<std::size_t>(increments.cols());
  if (n == 0) throw std::invalid_argument("path needs at least one segment");
  std::vector<double> bp(n + 1);
  for (std::size_t k = 0; k <= n; ++k) bp[k] = horizon * static_cast<double>(k) / static_cast<double>(n);
  bp.back() = horizon;
  Eigen::MatrixXd slopes(increments.rows(), increments.cols());
  for (std::size_t j = 0; j < n; ++j)
    slopes.col(static_cast<Eigen::Index>(j)) = increments.col(static_cast<Eigen::Index>(j)) / (bp[j + 1] - bp[j]);
  return {std::move(bp), std::move(slopes)};
}

PiecewiseLinearPath PiecewiseLinearPath::with_unit_time(const Eigen::MatrixXd& spatial_increments) {
  const auto n = spatial_increments.cols();
  Eigen::MatrixXd inc(spatial_increments.rows() + 1, n);
  inc.row(0).setConstant(1.0 / static_cast<double>(n));
  inc.bottomRows(spatial_increments.rows()) = spatial_increments;
  auto w = from_increments(inc);
  w.slopes_.row(0).setOnes();
  return w;
}

Eigen::VectorXd PiecewiseLinearPath::evaluate(double t) const {
  if (!(t >= 0.0 && t <= horizon())) throw std::out_of_range("path evaluated outside [0, horizon]");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(slopes_.rows());
  for (std::size_t j = 0; j < segments(); ++j) {
    const double lo = breakpoints_[j];
    const double hi = breakpoints_[j + 1];
    if (t <= lo) break;
    x += slopes_.col(static_cast<Eigen::Index>(j)) * (std::min(t, hi) - lo);
  }
  return x;
}

double total_variation(const PiecewiseLinearPath& w) {
  double tv = 0.0;
  for (std::size_t j = 0; j < w.segments(); ++j)
    tv += w.segment_length(j) * w.slopes().col(static_cast<Eigen::Index>(j)).cwiseAbs().maxCoeff();
  return tv;
}

PiecewiseLinearPath scale_to_horizon(const PiecewiseLinearPath& w, double horizon) {
  if (!(horizon > 0.0)) throw std::invalid_argument("scale_to_horizon: horizon must be positive");
  std::vector<double> bp = w.breakpoints();
  for (double& s : bp) s *= horizon;
  // Time coordinate: T w(t/T) has unchanged slope; spatial: sqrt(T) w(t/T)
  // has slope divided by sqrt(T).
  Eigen::MatrixXd slopes = w.slopes();
  slopes.bottomRows(slopes.rows() - 1) /= std::sqrt(horizon);
  return {std::move(bp), std::move(slopes)};
}

PiecewiseLinearPath concat_paths(const PiecewiseLinearPath& w, const PiecewiseLinearPath& v) {
  if (w.dim() != v.dim()) throw std::invalid_argument("concat_paths: dimension mismatch");
  std::vector<double> bp = w.breakpoints();
  const double shift = w.horizon();
  for (std::size_t k = 1; k < v.breakpoints().size(); ++k) bp.push_back(shift + v.breakpoints()[k]);
  Eigen::MatrixXd slopes(w.slopes().rows(), w.slopes().cols() + v.slopes().cols());
  slopes << w.slopes(), v.slopes();
  return {std::move(bp), std::move(slopes)};
}

void to_json(nlohmann::json& j, const PiecewiseLinearPath& w) {
  nlohmann::json slopes = nlohmann::json::array();
  for (Eigen::Index c = 0; c < w.slopes().cols(); ++c) {
    std::vector<double> col(w.slopes().col(c).data(), w.slopes().col(c).data() + w.slopes().rows());
    slopes.push_back(col);
  }
  j = nlohmann::json{{"breakpoints", w.breakpoints()}, {"slopes", std::move(slopes)}};
}

PiecewiseLinearPath path_from_json(const nlohmann::json& j) {
  auto bp = j.at("breakpoints").get<std::vector<double>>();
  const auto& slopes = j.at("slopes");
  if (!slopes.is_array() || slopes.empty()) throw std::invalid_argument("path JSON: slopes must be a nonempty array");
  const auto rows = slopes.front().size();
  Eigen::MatrixXd s(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(slopes.size()));
  for (std::size_t c = 0; c < slopes.size(); ++c) {
    auto col = slopes[c].get<std::vector<double>>();
    if (col.size() != rows) throw std::invalid_argument("path JSON: ragged slope vectors");
    for (std::size_t r = 0; r < rows; ++r) s(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col[r];
  }
  return {std::move(bp), std::move(s)};
}

}  // namespace wcub
