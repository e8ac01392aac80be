#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wcub/path.hpp"

namespace wcub {

enum class Scheme { a, b };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

/// How a formula's candidate paths were drawn.
struct GeneratorInfo {
  Scheme scheme = Scheme::a;
  int segments = 0;  // M
  int candidates = 0;  // N
  std::uint64_t seed = 0;
};

/// Weighted paths on [0, horizon] matching Brownian signature moments to degree m.
struct CubatureFormula {
  int d = 0;
  int m = 0;
  double horizon = 1.0;
  std::vector<PiecewiseLinearPath> paths;
  std::vector<double> weights;
  /// Max-norm of the (unscaled) moment mismatch over A(m).
  double residual = 0.0;
  std::optional<GeneratorInfo> generator;
  /// File name of the run manifest that produced this formula, if any.
  std::string manifest;

  std::size_t size() const { return paths.size(); }

  /// Reorders paths so that weights are descending (stable).
  void sort_by_weight();
};

nlohmann::json to_json(const CubatureFormula& f);
CubatureFormula formula_from_json(const nlohmann::json& j);

CubatureFormula read_formula(const std::string& file);
void write_formula(const CubatureFormula& f, const std::string& file);

}  // namespace wcub
