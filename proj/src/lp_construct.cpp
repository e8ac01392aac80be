#include "wcub/lp_construct.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "wcub/parallel.hpp"
#include "wcub/signature.hpp"

namespace wcub {

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::feasible:
      return "feasible";
    case LpStatus::infeasible:
      return "infeasible";
    case LpStatus::numerical_failure:
      return "numerical-failure";
  }
  return "?";
}

Eigen::MatrixXd LpInstance::scaled_matrix() const {
  return row_scale.cwiseInverse().asDiagonal() * signatures * col_scale.asDiagonal();
}

Eigen::VectorXd LpInstance::scaled_target() const { return target.cwiseQuotient(row_scale); }

LpInstance build_instance(Eigen::MatrixXd signatures, const MomentVector& b, double epsilon) {
  if (signatures.cols() == 0) throw std::invalid_argument("build_instance: no candidate paths");
  if (signatures.rows() != b.values.size())
    throw std::invalid_argument("build_instance: signature rows do not match the moment basis");
  LpInstance inst;
  inst.basis = b.basis;
  inst.target = b.values;
  inst.row_scale = signatures.cwiseAbs().rowwise().maxCoeff();
  for (Eigen::Index i = 0; i < inst.row_scale.size(); ++i)
    if (!(inst.row_scale[i] > 0.0)) inst.row_scale[i] = 1.0;
  inst.col_scale = Eigen::VectorXd::Ones(signatures.cols());
  inst.signatures = std::move(signatures);
  inst.epsilon = epsilon;
  return inst;
}

LpInstance build_instance(const std::vector<PiecewiseLinearPath>& paths, const BasisPtr& basis, const MomentVector& b,
                          double epsilon) {
  if (paths.empty()) throw std::invalid_argument("build_instance: no candidate paths");
  if (!b.basis->same_shape(*basis)) throw std::invalid_argument("build_instance: moment basis differs");
  Eigen::MatrixXd sig(static_cast<Eigen::Index>(basis->size()), static_cast<Eigen::Index>(paths.size()));
  parallel_for(paths.size(), [&](std::size_t j) {
    sig.col(static_cast<Eigen::Index>(j)) = path_signature(paths[j], basis).coeffs();
  });
  return build_instance(std::move(sig), b, epsilon);
}

std::vector<Eigen::Index> LpSolution::support() const {
  std::vector<Eigen::Index> out;
  for (Eigen::Index j = 0; j < weights.size(); ++j)
    if (weights[j] > 0.0) out.push_back(j);
  return out;
}

namespace {

Eigen::MatrixXd gather(const Eigen::MatrixXd& A, const std::vector<Eigen::Index>& cols) {
  Eigen::MatrixXd out(A.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = A.col(cols[k]);
  return out;
}

double max_residual(const Eigen::MatrixXd& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  return (A * x - b).cwiseAbs().maxCoeff();
}

}  // namespace

LpSolution solve_feasibility(const LpInstance& inst, const SimplexOptions& opts) {
  const Eigen::MatrixXd A = inst.scaled_matrix();
  const Eigen::VectorXd b = inst.scaled_target();
  const Phase1Result ph = simplex_phase_one(A, b, opts);

  LpSolution sol;
  sol.iterations = ph.iterations;
  sol.objective = ph.objective;
  sol.message = ph.message;
  if (ph.status == Phase1Status::numerical_failure) {
    sol.status = LpStatus::numerical_failure;
    sol.weights = Eigen::VectorXd::Zero(A.cols());
    return sol;
  }
  const double threshold = inst.epsilon * std::sqrt(static_cast<double>(A.rows()));
  Eigen::VectorXd x = ph.x.cwiseMax(0.0).cwiseQuotient(inst.col_scale);
  if (ph.status == Phase1Status::row_certificate || ph.objective > threshold) {
    // Farkas check: A^T y <= 0 and b^T y > 0 rule out any x >= 0.
    const double gap = b.dot(ph.dual);
    const double slack = (A.transpose() * ph.dual).maxCoeff();
    sol.weights = x;
    sol.residual = max_residual(A, x, b);
    if (gap > threshold && slack <= 1e-9 * (1.0 + ph.dual.lpNorm<1>())) {
      sol.status = LpStatus::infeasible;
    } else {
      sol.status = LpStatus::numerical_failure;
      sol.message = "phase one stopped without a valid infeasibility certificate";
    }
    return sol;
  }

  double residual = max_residual(A, x, b);
  std::vector<Eigen::Index> support;
  for (Eigen::Index j = 0; j < x.size(); ++j)
    if (x[j] > 0.0) support.push_back(j);
  if (!support.empty()) {
    const Eigen::MatrixXd As = gather(A, support);
    const Eigen::VectorXd polished = As.colPivHouseholderQr().solve(b);
    if (polished.allFinite() && polished.minCoeff() >= 0.0) {
      Eigen::VectorXd candidate = Eigen::VectorXd::Zero(x.size());
      for (std::size_t k = 0; k < support.size(); ++k) candidate[support[k]] = polished[static_cast<Eigen::Index>(k)];
      const double r = max_residual(A, candidate, b);
      if (r < residual) {
        x = candidate;
        residual = r;
      }
    }
  }
  sol.weights = x;
  sol.residual = residual;
  if (residual <= inst.epsilon) {
    sol.status = LpStatus::feasible;
    return sol;
  }
  std::vector<bool> used(static_cast<std::size_t>(A.rows()), false);
  for (auto i : ph.rows_used) used[static_cast<std::size_t>(i)] = true;
  double kept_residual = 0.0, dropped_residual = 0.0;
  const Eigen::VectorXd r = (A * x - b).cwiseAbs();
  for (Eigen::Index i = 0; i < r.size(); ++i)
    (used[static_cast<std::size_t>(i)] ? kept_residual : dropped_residual) =
        std::max(used[static_cast<std::size_t>(i)] ? kept_residual : dropped_residual, r[i]);
  if (kept_residual <= inst.epsilon) {
    // The dropped rows are combinations of the kept ones, so no weighting
    // can satisfy them if this one does not.
    sol.status = LpStatus::infeasible;
    sol.message = "target is inconsistent with linearly dependent moment rows";
  } else {
    sol.status = LpStatus::numerical_failure;
    sol.message = "phase one converged but the vertex residual exceeds the tolerance";
  }
  return sol;
}

Reduction caratheodory_reduce(const LpInstance& inst, const Eigen::VectorXd& weights, double rank_tolerance) {
  if (weights.size() != inst.cols()) throw std::invalid_argument("caratheodory_reduce: weight count mismatch");
  if (weights.minCoeff() < 0.0) throw std::invalid_argument("caratheodory_reduce: weights must be nonnegative");
  const Eigen::MatrixXd A = inst.scaled_matrix();
  const Eigen::VectorXd b = inst.scaled_target();
  Eigen::VectorXd lambda = weights;
  Reduction out;
  double residual = max_residual(A, lambda, b);

  for (;;) {
    std::vector<Eigen::Index> support;
    for (Eigen::Index j = 0; j < lambda.size(); ++j)
      if (lambda[j] > 0.0) support.push_back(j);
    const Eigen::MatrixXd As = gather(A, support);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(As);
    qr.setThreshold(rank_tolerance);
    const Eigen::Index k = qr.rank();
    const auto s = static_cast<Eigen::Index>(support.size());
    if (k == s) {
      out.kept = support;
      out.weights.resize(s);
      for (Eigen::Index i = 0; i < s; ++i) out.weights[i] = lambda[support[static_cast<std::size_t>(i)]];
      break;
    }
    // Null vector: first dependent pivoted column expressed in the leading k.
    const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(k, s).template triangularView<Eigen::Upper>();
    Eigen::VectorXd permuted = Eigen::VectorXd::Zero(s);
    permuted[k] = 1.0;
    if (k > 0)
      permuted.head(k) =
          -R.topLeftCorner(k, k).template triangularView<Eigen::Upper>().solve(R.col(k));
    Eigen::VectorXd v = qr.colsPermutation() * permuted;
    if (!v.allFinite()) throw ReductionError("caratheodory_reduce: null vector is not finite");
    if (v.maxCoeff() <= 0.0) v = -v;

    double step = std::numeric_limits<double>::infinity();
    Eigen::Index hit = -1;
    for (Eigen::Index i = 0; i < s; ++i) {
      if (v[i] <= 0.0) continue;
      const double t = lambda[support[static_cast<std::size_t>(i)]] / v[i];
      if (t < step) {
        step = t;
        hit = i;
      }
    }
    if (hit < 0) throw ReductionError("caratheodory_reduce: null vector has no positive entry");
    for (Eigen::Index i = 0; i < s; ++i) {
      auto& w = lambda[support[static_cast<std::size_t>(i)]];
      w -= step * v[i];
      if (w < 0.0) w = 0.0;
    }
    lambda[support[static_cast<std::size_t>(hit)]] = 0.0;
    ++out.steps;

    const double next = max_residual(A, lambda, b);
    if (next > residual + inst.epsilon)
      throw ReductionError("caratheodory_reduce: residual grew by more than epsilon in one step");
    residual = next;
  }
  out.residual = residual;
  return out;
}

MomentCheck check_moments(const CubatureFormula& f) {
  if (f.paths.empty()) throw std::invalid_argument("check_moments: empty formula");
  const auto basis = enumerate_basis(f.d, f.m);
  const auto target = analytic_moments(basis);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis->size()));
  for (std::size_t j = 0; j < f.paths.size(); ++j) acc += f.weights[j] * path_signature(f.paths[j], basis).coeffs();
  MomentCheck out;
  out.per_degree.assign(static_cast<std::size_t>(f.m) + 1, 0.0);
  for (std::size_t i = 0; i < basis->size(); ++i) {
    const int deg = basis->degree(i);
    // Moments on [0, T] carry the factor T^(deg/2).
    const double expected = target.values[static_cast<Eigen::Index>(i)] * std::pow(f.horizon, 0.5 * deg);
    const double err = std::abs(acc[static_cast<Eigen::Index>(i)] - expected);
    out.per_degree[static_cast<std::size_t>(deg)] = std::max(out.per_degree[static_cast<std::size_t>(deg)], err);
    out.max_residual = std::max(out.max_residual, err);
  }
  return out;
}

CubatureFormula degree3_formula(int d) {
  if (d < 1) throw std::invalid_argument("degree3_formula: d must be >= 1");
  if (d > 20) throw std::invalid_argument("degree3_formula: d > 20 would enumerate too many paths");
  CubatureFormula f;
  f.d = d;
  f.m = 3;
  const std::size_t n = std::size_t{1} << d;
  const double weight = 1.0 / static_cast<double>(n);
  for (std::size_t mask = 0; mask < n; ++mask) {
    Eigen::MatrixXd slope(d + 1, 1);
    slope(0, 0) = 1.0;
    for (int i = 0; i < d; ++i) slope(i + 1, 0) = (mask >> i) & 1U ? -1.0 : 1.0;
    f.paths.emplace_back(std::vector<double>{0.0, 1.0}, std::move(slope));
    f.weights.push_back(weight);
  }
  f.residual = check_moments(f).max_residual;
  return f;
}

ConstructionResult construct_formula(const ConstructionConfig& cfg) {
  const auto basis = enumerate_basis(cfg.d, cfg.m);
  SamplerConfig sampler = cfg.sampler;
  sampler.d = cfg.d;
  const auto paths = sample_paths(sampler, cfg.candidates);
  const auto inst = build_instance(paths, basis, analytic_moments(basis), cfg.epsilon);
  const auto sol = solve_feasibility(inst);

  ConstructionResult out;
  out.status = sol.status;
  out.objective = sol.objective;
  out.iterations = sol.iterations;
  out.message = sol.message;
  if (sol.status != LpStatus::feasible) return out;

  Reduction red;
  try {
    red = caratheodory_reduce(inst, sol.weights);
  } catch (const ReductionError& e) {
    out.status = LpStatus::numerical_failure;
    out.message = e.what();
    return out;
  }

  CubatureFormula f;
  f.d = cfg.d;
  f.m = cfg.m;
  f.generator = GeneratorInfo{sampler.scheme, sampler.segments, static_cast<int>(cfg.candidates), sampler.seed};
  const double total = red.weights.sum();
  for (std::size_t k = 0; k < red.kept.size(); ++k) {
    f.paths.push_back(paths[static_cast<std::size_t>(red.kept[k])]);
    f.weights.push_back(red.weights[static_cast<Eigen::Index>(k)] / total);
  }
  f.sort_by_weight();
  f.residual = check_moments(f).max_residual;
  if (!(f.residual <= 2.0 * cfg.epsilon)) {
    out.status = LpStatus::numerical_failure;
    out.message = "constructed formula misses the moments by " + std::to_string(f.residual);
    return out;
  }
  out.formula = std::move(f);
  return out;
}

}  // namespace wcub
