#include "wcub/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wcub {

namespace {

class Tableau {
public:
  // Columns: structurals, then one artificial per row, then the right-hand side.
  Tableau(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double perturbation)
      : rows_(A.rows()), cols_(A.cols()), n_(cols_ + rows_), f_(rows_, n_), b_(b),
        sign_(Eigen::VectorXd::Ones(rows_)), shift_(rows_), t_(rows_ + 1, n_ + 1),
        basis_(static_cast<std::size_t>(rows_)) {
    f_ << A, Eigen::MatrixXd::Identity(rows_, rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (b_[i] < 0) {
        f_.row(i).head(cols_) *= -1.0;
        b_[i] = -b_[i];
        sign_[i] = -1.0;
      }
      basis_[static_cast<std::size_t>(i)] = cols_ + i;
      // distinct shifts break the ties that make zero moments degenerate
      const double u = std::fmod(0.6180339887498949 * static_cast<double>(i + 1), 1.0);
      shift_[i] = perturbation * (1.0 + u) * (1.0 + b_[i]);
    }
    t_.topLeftCorner(rows_, n_) = f_;
    t_.col(n_).head(rows_) = b_ + shift_;
    price();
  }

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  double reduced_cost(Eigen::Index j) const { return t_(rows_, j); }
  double objective() const { return -t_(rows_, n_); }
  double rhs(Eigen::Index i) const { return t_(i, n_); }
  double entry(Eigen::Index i, Eigen::Index j) const { return t_(i, j); }
  Eigen::Index basic(Eigen::Index i) const { return basis_[static_cast<std::size_t>(i)]; }
  bool artificial(Eigen::Index i) const { return basic(i) >= cols_; }

  void pivot(Eigen::Index p, Eigen::Index q) {
    t_.row(p) /= t_(p, q);
    Eigen::VectorXd col = t_.col(q);
    col[p] = 0.0;
    t_.noalias() -= col * t_.row(p);
    t_.col(q).setZero();
    t_(p, q) = 1.0;
    if (t_(p, n_) < 0.0) t_(p, n_) = 0.0;
    basis_[static_cast<std::size_t>(p)] = q;
  }

  /// Rebuilds the tableau as B^-1 [A | I | b] for the current basis.
  bool refactor(bool shifted, bool clip) {
    Eigen::MatrixXd B(rows_, rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) B.col(i) = f_.col(basic(i));
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    if (!(lu.rcond() > 1e-13)) return false;
    t_.topLeftCorner(rows_, n_) = lu.solve(f_);
    Eigen::VectorXd x = lu.solve(shifted ? Eigen::VectorXd(b_ + shift_) : b_);
    t_.col(n_).head(rows_) = clip ? Eigen::VectorXd(x.cwiseMax(0.0)) : x;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      t_.col(basic(i)).head(rows_).setZero();
      t_(i, basic(i)) = 1.0;
    }
    price();
    return true;
  }

  /// Phase-one duals for the caller's rows, read off the artificial columns.
  Eigen::VectorXd duals() const {
    Eigen::VectorXd y(rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) y[i] = sign_[i] * (1.0 - reduced_cost(cols_ + i));
    return y;
  }

  /// Row r of B^-1, negated, for the caller's rows. If row r has a negative
  /// right-hand side and no negative structural entry, this is a Farkas vector.
  Eigen::VectorXd row_certificate(Eigen::Index r) const {
    Eigen::VectorXd y(rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) y[i] = -sign_[i] * t_(r, cols_ + i);
    return y;
  }

private:
  // Phase-one prices: cost 1 on artificials, 0 on structurals.
  void price() {
    t_.row(rows_).setZero();
    t_.row(rows_).segment(cols_, rows_).setOnes();
    for (Eigen::Index i = 0; i < rows_; ++i)
      if (artificial(i)) t_.row(rows_) -= t_.row(i);
    for (Eigen::Index i = 0; i < rows_; ++i) t_(rows_, basic(i)) = 0.0;
  }

  Eigen::Index rows_;
  Eigen::Index cols_;
  Eigen::Index n_;
  Eigen::MatrixXd f_;
  Eigen::VectorXd b_;
  Eigen::VectorXd sign_;
  Eigen::VectorXd shift_;
  Eigen::MatrixXd t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

Phase1Result simplex_phase_one(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const SimplexOptions& opts) {
  if (A.rows() != b.size()) throw std::invalid_argument("simplex: row count of A and b differ");
  if (A.cols() == 0) throw std::invalid_argument("simplex: no columns");
  // Drop linearly dependent rows; pivoting on them only chases roundoff.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rows_qr(A.transpose());
  rows_qr.setThreshold(opts.row_rank_tolerance);
  const Eigen::Index rank = std::max<Eigen::Index>(rows_qr.rank(), 1);
  std::vector<Eigen::Index> kept(static_cast<std::size_t>(rank));
  for (Eigen::Index i = 0; i < rank; ++i) kept[static_cast<std::size_t>(i)] = rows_qr.colsPermutation().indices()[i];
  std::sort(kept.begin(), kept.end());
  Eigen::MatrixXd A_kept(rank, A.cols());
  Eigen::VectorXd b_kept(rank);
  for (Eigen::Index i = 0; i < rank; ++i) {
    A_kept.row(i) = A.row(kept[static_cast<std::size_t>(i)]);
    b_kept[i] = b[kept[static_cast<std::size_t>(i)]];
  }
  Tableau tab(A_kept, b_kept, opts.perturbation);
  const std::size_t max_iter =
      opts.max_iterations ? opts.max_iterations : 20 * static_cast<std::size_t>(A.rows() + A.cols());
  Phase1Result result;
  std::size_t degenerate = 0;
  std::size_t since_refactor = 0;
  bool bland = false;
  double best_objective = tab.objective();
  Eigen::VectorXd certificate;

  for (;;) {
    if (tab.objective() <= 0.0) break;
    Eigen::Index q = -1;
    if (bland) {
      for (Eigen::Index j = 0; j < tab.cols(); ++j)
        if (tab.reduced_cost(j) < -opts.optimality_tolerance) {
          q = j;
          break;
        }
    } else {
      double best = -opts.optimality_tolerance;
      for (Eigen::Index j = 0; j < tab.cols(); ++j)
        if (tab.reduced_cost(j) < best) {
          best = tab.reduced_cost(j);
          q = j;
        }
    }
    if (q < 0) break;  // optimal

    Eigen::Index p = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < tab.rows(); ++i) {
      const double a = tab.entry(i, q);
      if (a <= opts.pivot_tolerance) continue;
      const double ratio = tab.rhs(i) / a;
      if (p < 0 || ratio < best_ratio - 1e-12 * (1.0 + std::abs(best_ratio))) {
        p = i;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + 1e-12 * (1.0 + std::abs(best_ratio))) {
        // Bland needs the smallest index on ties; otherwise drive artificials out first.
        const bool prefer = bland ? tab.basic(i) < tab.basic(p)
                                  : (tab.artificial(i) && !tab.artificial(p)) ||
                                        (tab.artificial(i) == tab.artificial(p) && tab.basic(i) < tab.basic(p));
        if (prefer) {
          p = i;
          best_ratio = std::min(best_ratio, ratio);
        }
      }
    }
    if (p < 0) {
      // Phase one is bounded below by zero, so an unbounded ray means the
      // tableau has lost accuracy.
      result.status = Phase1Status::numerical_failure;
      result.message = "unbounded direction in phase one";
      break;
    }
    tab.pivot(p, q);
    ++result.iterations;
    ++since_refactor;
    // Stalling is judged against the best objective seen, so roundoff
    // wobble does not count as progress.
    if (tab.objective() < best_objective - 1e-9 * (1.0 + best_objective)) {
      best_objective = tab.objective();
      degenerate = 0;
      bland = false;
    } else if (++degenerate >= opts.degenerate_streak) {
      bland = true;
    }
    if (since_refactor >= opts.refactor_interval) {
      since_refactor = 0;
      if (!tab.refactor(true, true)) {
        result.status = Phase1Status::numerical_failure;
        result.message = "basis matrix became singular";
        break;
      }
    }
    if (result.iterations >= max_iter) {
      result.status = Phase1Status::numerical_failure;
      result.message = "iteration limit reached";
      break;
    }
  }

  // Drop the shift. The basis stays dual feasible over the structurals, so
  // dual simplex pivots repair any basic variable the shift was holding
  // above zero. Artificials that left the basis stay out, as in the primal.
  if (result.status == Phase1Status::optimal) {
    if (!tab.refactor(false, false)) {
      result.status = Phase1Status::numerical_failure;
      result.message = "final basis matrix is singular";
    }
    since_refactor = 0;
    while (result.status == Phase1Status::optimal) {
      Eigen::Index r = -1;
      double worst = -opts.feasibility_tolerance;
      for (Eigen::Index i = 0; i < tab.rows(); ++i)
        if (tab.rhs(i) < worst) {
          worst = tab.rhs(i);
          r = i;
        }
      if (r < 0) break;
      // Harris ratio test: bound the step with slightly relaxed reduced
      // costs, then take the largest pivot element within the bound.
      double bound = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < tab.cols(); ++j) {
        const double a = tab.entry(r, j);
        if (a < -opts.pivot_tolerance)
          bound = std::min(bound, (std::max(tab.reduced_cost(j), 0.0) + opts.optimality_tolerance) / -a);
      }
      Eigen::Index q = -1;
      for (Eigen::Index j = 0; j < tab.cols(); ++j) {
        const double a = tab.entry(r, j);
        if (a < -opts.pivot_tolerance && std::max(tab.reduced_cost(j), 0.0) / -a <= bound &&
            (q < 0 || a < tab.entry(r, q)))
          q = j;
      }
      if (q < 0) {
        result.status = Phase1Status::row_certificate;
        certificate = tab.row_certificate(r);
        break;
      }
      tab.pivot(r, q);
      ++result.iterations;
      if (++since_refactor >= opts.refactor_interval) {
        since_refactor = 0;
        if (!tab.refactor(false, false)) {
          result.status = Phase1Status::numerical_failure;
          result.message = "basis matrix became singular";
        }
      }
      if (result.iterations >= 2 * max_iter) {
        result.status = Phase1Status::numerical_failure;
        result.message = "iteration limit reached while removing the shift";
      }
    }
    if (result.status == Phase1Status::optimal && !tab.refactor(false, true)) {
      result.status = Phase1Status::numerical_failure;
      result.message = "final basis matrix is singular";
    }
  }

  result.x = Eigen::VectorXd::Zero(A.cols());
  double artificial_sum = 0.0;
  for (Eigen::Index i = 0; i < tab.rows(); ++i) {
    if (tab.artificial(i)) {
      artificial_sum += tab.rhs(i);
    } else {
      result.x[tab.basic(i)] = tab.rhs(i);
      result.basic_columns.push_back(tab.basic(i));
    }
  }
  result.objective = artificial_sum;
  result.rows_used = kept;
  result.dual = Eigen::VectorXd::Zero(A.rows());
  if (result.status != Phase1Status::numerical_failure) {
    const Eigen::VectorXd y = result.status == Phase1Status::optimal ? tab.duals() : certificate;
    for (Eigen::Index i = 0; i < rank; ++i) result.dual[kept[static_cast<std::size_t>(i)]] = y[i];
  }
  return result;
}

}  // namespace wcub
