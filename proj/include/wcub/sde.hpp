#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wcub/expr.hpp"

namespace wcub {

/// A vector field produced a non-finite value.
class DomainError : public std::runtime_error {
public:
  DomainError(int field, int component, double value)
      : std::runtime_error("V" + std::to_string(field) + "[" + std::to_string(component) +
                           "] evaluated to a non-finite value (" + std::to_string(value) + ")"),
        field_(field),
        component_(component) {}
  int field() const { return field_; }
  int component() const { return component_; }

private:
  int field_;
  int component_;
};

/// Vector fields V_0, ..., V_d : R^N -> R^N of the Stratonovich SDE
/// dX = sum_i V_i(X) o dB^i + V_0(X) dt.
class VectorFieldSystem {
public:
  /// fields[i][c] is component c+1 of V_i.
  VectorFieldSystem(int state_dim, int driving_dim, std::vector<std::vector<Expression>> fields);

  int state_dim() const { return n_; }
  int driving_dim() const { return d_; }
  const Expression& component(int field, int c) const { return fields_[static_cast<std::size_t>(field)][static_cast<std::size_t>(c)]; }

  /// V_i(x); throws DomainError on non-finite output.
  Eigen::VectorXd evaluate_field(int i, const Eigen::VectorXd& x) const;

  /// sum_i g[i] V_i(x), skipping fields whose coefficient is zero.
  Eigen::VectorXd drive(const Eigen::VectorXd& g, const Eigen::VectorXd& x) const;

  /// Checks that every field evaluates to finite values at each point.
  void validate_at(const std::vector<Eigen::VectorXd>& points) const;

  /// Source text in the system grammar; parse_system(to_string()) reproduces it.
  std::string to_string() const;

private:
  int n_;
  int d_;
  std::vector<std::vector<Expression>> fields_;
};

/**
 * System grammar. Statements are separated by ';' or newlines ('#' starts a
 * comment); N and d must be declared before the first field:
 *   N = 1; d = 1
 *   V0[1] = 0
 *   V1[1] = x1
 * Every component V_i[c] for 0 <= i <= d, 1 <= c <= N must be given once.
 */
VectorFieldSystem parse_system(std::string_view text);

/// Registered systems: "gbm", "linear", "ou" (see README for their fields).
VectorFieldSystem builtin_system(const std::string& name);
std::vector<std::string> builtin_system_names();
bool is_builtin_system(const std::string& name);

}  // namespace wcub
