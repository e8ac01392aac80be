#include "wcub/formula.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace wcub {

std::string to_string(Scheme s) { return s == Scheme::a ? "a" : "b"; }

Scheme parse_scheme(const std::string& s) {
  if (s == "a") return Scheme::a;
  if (s == "b") return Scheme::b;
  throw std::invalid_argument("unknown sampling scheme '" + s + "' (expected a or b)");
}

void CubatureFormula::sort_by_weight() {
  std::vector<std::size_t> order(paths.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return weights[x] > weights[y]; });
  std::vector<PiecewiseLinearPath> p;
  std::vector<double> w;
  p.reserve(order.size());
  w.reserve(order.size());
  for (auto i : order) {
    p.push_back(paths[i]);
    w.push_back(weights[i]);
  }
  paths = std::move(p);
  weights = std::move(w);
}

nlohmann::json to_json(const CubatureFormula& f) {
  nlohmann::json paths = nlohmann::json::array();
  for (const auto& w : f.paths) paths.push_back(w);
  nlohmann::json j;
  j["d"] = f.d;
  j["m"] = f.m;
  j["horizon"] = f.horizon;
  j["paths"] = std::move(paths);
  j["weights"] = f.weights;
  j["residual"] = f.residual;
  if (f.generator) {
    j["generator"] = {{"scheme", to_string(f.generator->scheme)},
                      {"M", f.generator->segments},
                      {"N", f.generator->candidates},
                      {"seed", f.generator->seed}};
  }
  if (!f.manifest.empty()) j["manifest"] = f.manifest;
  return j;
}

CubatureFormula formula_from_json(const nlohmann::json& j) {
  CubatureFormula f;
  f.d = j.at("d").get<int>();
  f.m = j.at("m").get<int>();
  f.horizon = j.value("horizon", 1.0);
  for (const auto& p : j.at("paths")) f.paths.push_back(path_from_json(p));
  f.weights = j.at("weights").get<std::vector<double>>();
  f.residual = j.value("residual", 0.0);
  if (j.contains("generator")) {
    const auto& g = j.at("generator");
    f.generator = GeneratorInfo{parse_scheme(g.at("scheme").get<std::string>()), g.at("M").get<int>(),
                                g.at("N").get<int>(), g.at("seed").get<std::uint64_t>()};
  }
  f.manifest = j.value("manifest", std::string{});
  if (f.paths.size() != f.weights.size()) throw std::invalid_argument("formula: paths and weights differ in length");
  for (const auto& p : f.paths)
    if (p.dim() != f.d) throw std::invalid_argument("formula: path dimension does not match d");
  return f;
}

CubatureFormula read_formula(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open formula file '" + file + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("malformed formula file '" + file + "': " + e.what());
  }
  try {
    return formula_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("malformed formula file '" + file + "': " + e.what());
  }
}

void write_formula(const CubatureFormula& f, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write formula file '" + file + "'");
  out << to_json(f).dump(2) << '\n';
}

}  // namespace wcub
