#include "wcub/weak_approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "wcub/parallel.hpp"
#include "wcub/rng.hpp"

namespace wcub {

Eigen::VectorXd ode_flow(const VectorFieldSystem& sys, const Eigen::VectorXd& x0, const PiecewiseLinearPath& w,
                         int substeps) {
  if (substeps < 1) throw std::invalid_argument("ode_flow: substeps must be >= 1");
  if (w.dim() != sys.driving_dim()) throw std::invalid_argument("ode_flow: path and system driving dimensions differ");
  if (x0.size() != sys.state_dim()) throw std::invalid_argument("ode_flow: initial state has wrong dimension");
  Eigen::VectorXd x = x0;
  for (std::size_t j = 0; j < w.segments(); ++j) {
    const Eigen::VectorXd g = w.slopes().col(static_cast<Eigen::Index>(j));
    const double h = w.segment_length(j) / substeps;
    for (int s = 0; s < substeps; ++s) {
      const Eigen::VectorXd k1 = sys.drive(g, x);
      const Eigen::VectorXd k2 = sys.drive(g, x + 0.5 * h * k1);
      const Eigen::VectorXd k3 = sys.drive(g, x + 0.5 * h * k2);
      const Eigen::VectorXd k4 = sys.drive(g, x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return x;
}

Partition make_partition(double horizon, int k, double gamma) {
  if (!(horizon > 0.0)) throw std::invalid_argument("make_partition: horizon must be positive");
  if (k < 1) throw std::invalid_argument("make_partition: k must be >= 1");
  if (!(gamma >= 1.0)) throw std::invalid_argument("make_partition: gamma must be >= 1");
  Partition p{horizon, k, gamma, std::vector<double>(static_cast<std::size_t>(k) + 1)};
  for (int l = 0; l <= k; ++l)
    p.times[static_cast<std::size_t>(l)] = horizon * (1.0 - std::pow(1.0 - static_cast<double>(l) / k, gamma));
  p.times.front() = 0.0;
  p.times.back() = horizon;
  return p;
}

std::string to_string(TreeMode m) {
  switch (m) {
    case TreeMode::exact:
      return "exact";
    case TreeMode::sampled:
      return "sampled";
    case TreeMode::affine:
      return "affine";
  }
  return "?";
}

TreeMode parse_tree_mode(const std::string& s) {
  if (s == "exact") return TreeMode::exact;
  if (s == "sampled") return TreeMode::sampled;
  if (s == "affine") return TreeMode::affine;
  throw std::invalid_argument("unknown tree mode '" + s + "' (expected exact, sampled or affine)");
}

namespace {

double eval_f(const Expression& f, const Eigen::VectorXd& x) {
  return f.evaluate(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

struct Steps {
  // scaled[l][j]: path j of the formula scaled to subinterval l.
  std::vector<std::vector<PiecewiseLinearPath>> scaled;
  std::vector<double> weights;
};

Steps prepare(const CubatureFormula& formula, const VectorFieldSystem& sys, const Eigen::VectorXd& x0,
              const Expression& f, const Partition& part) {
  if (formula.paths.empty()) throw std::invalid_argument("tree_expectation: empty formula");
  if (formula.d != sys.driving_dim())
    throw std::invalid_argument("dimension mismatch: formula has d = " + std::to_string(formula.d) +
                                " but the SDE is driven by d = " + std::to_string(sys.driving_dim()) +
                                " Brownian motions");
  if (std::abs(formula.horizon - 1.0) > 1e-15) throw std::invalid_argument("tree_expectation: formula must live on [0,1]");
  if (x0.size() != sys.state_dim()) throw std::invalid_argument("tree_expectation: x0 has wrong dimension");
  if (f.variables() != sys.state_dim())
    throw std::invalid_argument("tree_expectation: functional is over a different state dimension");
  Steps s;
  s.weights = formula.weights;
  s.scaled.resize(static_cast<std::size_t>(part.steps));
  for (int l = 0; l < part.steps; ++l)
    for (const auto& w : formula.paths) s.scaled[static_cast<std::size_t>(l)].push_back(scale_to_horizon(w, part.step(l)));
  return s;
}

struct SubtreeResult {
  double value = 0.0;
  std::uint64_t solves = 0;
};

SubtreeResult visit(const Steps& steps, const VectorFieldSystem& sys, const Expression& f, int substeps,
                    std::size_t level, const Eigen::VectorXd& x) {
  if (level == steps.scaled.size()) return {eval_f(f, x), 0};
  SubtreeResult out;
  for (std::size_t j = 0; j < steps.weights.size(); ++j) {
    const auto next = ode_flow(sys, x, steps.scaled[level][j], substeps);
    const auto child = visit(steps, sys, f, substeps, level + 1, next);
    out.value += steps.weights[j] * child.value;
    out.solves += child.solves + 1;
  }
  return out;
}

TreeEvaluation exact_tree(const Steps& steps, const VectorFieldSystem& sys, const Eigen::VectorXd& x0,
                          const Expression& f, const TreeOptions& opts) {
  const std::uint64_t n = steps.weights.size();
  std::uint64_t leaves = 1;
  for (std::size_t l = 0; l < steps.scaled.size(); ++l) {
    if (leaves > opts.budget / n)
      throw BudgetExceeded("exact tree has " + std::to_string(n) + "^" + std::to_string(steps.scaled.size()) +
                           " leaves, more than the budget of " + std::to_string(opts.budget) +
                           "; use --mode sampled (or affine for affine systems)");
    leaves *= n;
  }
  // Independent subtrees below each first-step path.
  std::vector<SubtreeResult> parts(n);
  parallel_for(n, [&](std::size_t j) {
    const auto x1 = ode_flow(sys, x0, steps.scaled[0][j], opts.substeps);
    parts[j] = visit(steps, sys, f, opts.substeps, 1, x1);
    parts[j].solves += 1;
  });
  TreeEvaluation out;
  out.mode = TreeMode::exact;
  out.leaves = leaves;
  for (std::size_t j = 0; j < n; ++j) {
    out.value += steps.weights[j] * parts[j].value;
    out.ode_solves += parts[j].solves;
  }
  return out;
}

struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;
};

Moments merge(const Moments& a, const Moments& b) {
  if (a.count == 0.0) return b;
  if (b.count == 0.0) return a;
  Moments out;
  out.count = a.count + b.count;
  const double delta = b.mean - a.mean;
  out.mean = a.mean + delta * b.count / out.count;
  out.m2 = a.m2 + b.m2 + delta * delta * a.count * b.count / out.count;
  return out;
}

TreeEvaluation sampled_tree(const Steps& steps, const VectorFieldSystem& sys, const Eigen::VectorXd& x0,
                            const Expression& f, const TreeOptions& opts) {
  std::vector<double> cumulative(steps.weights.size());
  std::partial_sum(steps.weights.begin(), steps.weights.end(), cumulative.begin());
  const double total = cumulative.back();
  const CounterRng rng(opts.seed);
  constexpr std::uint64_t chunk = 256;
  const std::size_t chunks = static_cast<std::size_t>((opts.budget + chunk - 1) / chunk);
  std::vector<Moments> parts(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    Moments acc;
    const std::uint64_t lo = c * chunk;
    const std::uint64_t hi = std::min<std::uint64_t>(opts.budget, lo + chunk);
    for (std::uint64_t s = lo; s < hi; ++s) {
      Eigen::VectorXd x = x0;
      for (std::size_t l = 0; l < steps.scaled.size(); ++l) {
        const double u = rng.uniform({s, l}) * total;
        auto j = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        j = std::min(j, cumulative.size() - 1);
        x = ode_flow(sys, x, steps.scaled[l][j], opts.substeps);
      }
      const double v = eval_f(f, x);
      acc.count += 1.0;
      const double delta = v - acc.mean;
      acc.mean += delta / acc.count;
      acc.m2 += delta * (v - acc.mean);
    }
    parts[c] = acc;
  });
  const Moments total_moments = pairwise_reduce(std::move(parts), merge);
  TreeEvaluation out;
  out.mode = TreeMode::sampled;
  out.value = total_moments.mean;
  out.samples = opts.budget;
  out.ode_solves = opts.budget * steps.scaled.size();
  out.stderr_ = total_moments.count > 1.0
                    ? std::sqrt(total_moments.m2 / (total_moments.count - 1.0) / total_moments.count)
                    : 0.0;
  return out;
}

// Deterministic probe directions for the affinity checks.
Eigen::VectorXd probe_direction(Eigen::Index n, std::uint64_t salt) {
  const CounterRng rng(0x61ff1e);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 2.0 * rng.uniform({salt, static_cast<std::uint64_t>(i)}) - 1.0;
  return v;
}

template <typename Map>
void require_affine(Map map, const Eigen::VectorXd& at, const char* what) {
  const Eigen::Index n = at.size();
  const double scale = std::max(1.0, at.cwiseAbs().maxCoeff());
  const Eigen::VectorXd base = map(at);
  Eigen::MatrixXd jac(base.size(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd e = at;
    e[i] += scale;
    jac.col(i) = (map(e) - base) / scale;
  }
  for (std::uint64_t probe = 0; probe < 2; ++probe) {
    const Eigen::VectorXd v = probe_direction(n, probe) * (scale * (1.0 + 1.5 * static_cast<double>(probe)));
    const Eigen::VectorXd predicted = base + jac * v;
    const Eigen::VectorXd actual = map(at + v);
    const double tol = 1e-8 * (1.0 + actual.cwiseAbs().maxCoeff() + predicted.cwiseAbs().maxCoeff());
    if ((actual - predicted).cwiseAbs().maxCoeff() > tol)
      throw NotAffine(std::string(what) + " is not affine; affine mode needs affine flows and an affine functional");
  }
}

TreeEvaluation affine_tree(const Steps& steps, const VectorFieldSystem& sys, const Eigen::VectorXd& x0,
                           const Expression& f, const TreeOptions& opts) {
  TreeEvaluation out;
  out.mode = TreeMode::affine;
  // For affine flow maps F_j, E[F_j(X)] = F_j(E[X]), so the mean of the
  // cubature Markov chain moves through the weighted average of the maps.
  Eigen::VectorXd mean = x0;
  for (std::size_t l = 0; l < steps.scaled.size(); ++l) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(mean.size());
    for (std::size_t j = 0; j < steps.weights.size(); ++j) {
      const auto& w = steps.scaled[l][j];
      auto flow = [&](const Eigen::VectorXd& x) { return ode_flow(sys, x, w, opts.substeps); };
      require_affine(flow, mean, "the ODE flow");
      next += steps.weights[j] * flow(mean);
      ++out.ode_solves;
    }
    mean = next;
  }
  auto fmap = [&](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(1, eval_f(f, x)); };
  require_affine(fmap, mean, "the functional f");
  out.value = eval_f(f, mean);
  out.leaves = 0;
  return out;
}

}  // namespace

TreeEvaluation tree_expectation(const CubatureFormula& formula, const VectorFieldSystem& sys, const Eigen::VectorXd& x0,
                                const Expression& f, const Partition& part, const TreeOptions& opts) {
  if (opts.budget == 0 && opts.mode != TreeMode::affine) throw std::invalid_argument("tree_expectation: budget must be positive");
  const Steps steps = prepare(formula, sys, x0, f, part);
  switch (opts.mode) {
    case TreeMode::exact:
      return exact_tree(steps, sys, x0, f, opts);
    case TreeMode::sampled:
      return sampled_tree(steps, sys, x0, f, opts);
    case TreeMode::affine:
      return affine_tree(steps, sys, x0, f, opts);
  }
  throw std::logic_error("unreachable");
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

ConvergenceStudy convergence_study(const CubatureFormula& formula, const VectorFieldSystem& sys,
                                   const Eigen::VectorXd& x0, const Expression& f, double horizon,
                                   const std::vector<int>& ks, double gamma, double reference,
                                   const TreeOptions& opts) {
  if (ks.size() < 2) throw std::invalid_argument("convergence_study: need at least two values of k");
  ConvergenceStudy study;
  std::vector<double> xs, ys;
  for (int k : ks) {
    ConvergenceRow row;
    row.k = k;
    row.eval = tree_expectation(formula, sys, x0, f, make_partition(horizon, k, gamma), opts);
    row.value = row.eval.value;
    row.error = std::abs(row.value - reference);
    if (row.error > 0.0) {
      xs.push_back(k);
      ys.push_back(row.error);
    }
    study.rows.push_back(row);
  }
  study.slope = loglog_slope(xs, ys);
  return study;
}

}  // namespace wcub
