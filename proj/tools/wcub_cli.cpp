#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "wcub/lp_construct.hpp"
#include "wcub/moments.hpp"
#include "wcub/parallel.hpp"
#include "wcub/weak_approx.hpp"

#ifndef WCUB_VERSION
#define WCUB_VERSION "unknown"
#endif

namespace {

enum Exit { ok = 0, usage = 1, verification = 2, numerical = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string num(double x) { return fmt("%.17g", x); }

class Manifest {
public:
  Manifest(std::string command, nlohmann::json params) : start_(std::chrono::steady_clock::now()) {
    j_["command"] = std::move(command);
    j_["parameters"] = std::move(params);
    j_["seeds"] = nlohmann::json::array();
    j_["artifacts"] = nlohmann::json::array();
    j_["version"] = WCUB_VERSION;
  }
  void seed(std::uint64_t s) { j_["seeds"].push_back(s); }
  void artifact(const std::string& path) { j_["artifacts"].push_back(path); }

  // Timing lives only here, so every other output is reproducible byte for byte.
  void write(const std::string& path) {
    j_["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest '" + path + "'");
    out << j_.dump(2) << '\n';
  }

private:
  nlohmann::json j_;
  std::chrono::steady_clock::time_point start_;
};

void make_parent(const std::string& file) {
  const auto parent = std::filesystem::path(file).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

// ---- construct ----

struct ConstructArgs {
  int d = 0, m = 0;
  std::vector<int> M{2};
  std::vector<int> factors{4};
  std::string scheme = "a";
  std::uint64_t seed = 0;
  int trials = 10;
  std::string out;
};

int cmd_construct(const ConstructArgs& a) {
  if (a.d < 1 || a.m < 1) throw UsageError("--d and --m must be at least 1");
  if (a.trials < 1) throw UsageError("--trials must be at least 1");
  for (int M : a.M)
    if (M < 1) throw UsageError("--M values must be at least 1");
  for (int f : a.factors)
    if (f < 1) throw UsageError("--N-factor values must be at least 1");
  const auto scheme = wcub::parse_scheme(a.scheme);
  const auto basis = wcub::enumerate_basis(a.d, a.m);

  Manifest manifest("construct", {{"d", a.d},
                                  {"m", a.m},
                                  {"M", a.M},
                                  {"N_factor", a.factors},
                                  {"scheme", a.scheme},
                                  {"seed", a.seed},
                                  {"trials", a.trials},
                                  {"out", a.out}});
  for (int t = 0; t < a.trials; ++t) manifest.seed(a.seed + static_cast<std::uint64_t>(t));

  struct Job {
    int M, factor, trial;
    wcub::ConstructionResult result;
  };
  std::vector<Job> jobs;
  for (int f : a.factors)
    for (int M : a.M)
      for (int t = 0; t < a.trials; ++t) jobs.push_back({M, f, t, {}});
  wcub::parallel_for(jobs.size(), [&](std::size_t i) {
    auto& job = jobs[i];
    wcub::ConstructionConfig cfg;
    cfg.d = a.d;
    cfg.m = a.m;
    cfg.sampler = {a.d, job.M, scheme, a.seed + static_cast<std::uint64_t>(job.trial)};
    cfg.candidates = static_cast<std::size_t>(job.factor) * basis->size();
    job.result = wcub::construct_formula(cfg);
  });

  const std::string manifest_name = "manifest.json";
  if (!a.out.empty()) std::filesystem::create_directories(a.out);
  bool failed = false;
  std::printf("construct d=%d m=%d |A(m)|=%zu scheme=%s seed=%llu\n", a.d, a.m, basis->size(), a.scheme.c_str(),
              static_cast<unsigned long long>(a.seed));
  for (auto& job : jobs) {
    auto& r = job.result;
    std::string line = fmt("  N=%d|A(m)| M=%d trial %d: %s", job.factor, job.M, job.trial,
                           wcub::to_string(r.status).c_str());
    if (r.formula) {
      line += fmt(", %zu paths, residual %.2e", r.formula->size(), r.formula->residual);
      if (!a.out.empty()) {
        const auto name = fmt("formula_N%d_M%d_t%d.json", job.factor, job.M, job.trial);
        r.formula->manifest = manifest_name;
        wcub::write_formula(*r.formula, (std::filesystem::path(a.out) / name).string());
        manifest.artifact(name);
        line += " -> " + name;
      }
    } else if (!r.message.empty()) {
      line += " (" + r.message + ")";
    }
    failed = failed || r.status == wcub::LpStatus::numerical_failure;
    std::printf("%s\n", line.c_str());
  }

  // Rows N-factor, columns M, cells successes/trials.
  std::printf("\n%-10s", "N \\ M");
  for (int M : a.M) std::printf("%8d", M);
  std::printf("\n");
  std::size_t k = 0;
  for (int f : a.factors) {
    std::printf("%-10s", fmt("%d|A(m)|", f).c_str());
    for (std::size_t c = 0; c < a.M.size(); ++c) {
      int wins = 0;
      for (int t = 0; t < a.trials; ++t, ++k) wins += jobs[k].result.formula.has_value();
      std::printf("%8s", fmt("%d/%d", wins, a.trials).c_str());
    }
    std::printf("\n");
  }
  if (!a.out.empty()) manifest.write((std::filesystem::path(a.out) / manifest_name).string());
  return failed ? numerical : ok;
}

// ---- verify ----

int cmd_verify(const std::string& file, double tol) {
  if (!std::filesystem::exists(file)) throw UsageError("formula file '" + file + "' does not exist");
  wcub::CubatureFormula f;
  try {
    f = wcub::read_formula(file);
  } catch (const std::exception& e) {
    std::printf("FAIL %s\n", e.what());
    return verification;
  }
  bool pass = true;
  double total = 0.0;
  for (std::size_t j = 0; j < f.weights.size(); ++j) {
    const double w = f.weights[j];
    if (!std::isfinite(w)) {
      std::printf("FAIL weight %zu is not finite\n", j);
      pass = false;
    } else if (w < 0.0) {
      std::printf("FAIL negative weight %g at path %zu\n", w, j);
      pass = false;
    }
    total += w;
  }
  if (std::abs(total - 1.0) > tol) {
    std::printf("FAIL weights sum to %.17g\n", total);
    pass = false;
  }
  if (f.paths.empty()) {
    std::printf("FAIL formula has no paths\n");
    return verification;
  }
  const auto check = wcub::check_moments(f);
  std::printf("formula d=%d m=%d, %zu paths\n", f.d, f.m, f.size());
  for (std::size_t k = 0; k < check.per_degree.size(); ++k)
    std::printf("  degree %zu: max residual %.3e\n", k, check.per_degree[k]);
  const bool moments_ok = check.max_residual <= tol;
  std::printf("%s max residual %.3e (tol %.1e)\n", moments_ok ? "ok" : "FAIL", check.max_residual, tol);
  pass = pass && moments_ok;
  std::printf("%s\n", pass ? "PASS" : "FAIL");
  return pass ? ok : verification;
}

// ---- moments ----

struct MomentsArgs {
  int d = 0, m = 0;
  std::vector<std::string> oracle;
  bool with_oracle = false;
  std::string out;
};

int cmd_moments(const MomentsArgs& a) {
  if (a.d < 1 || a.m < 1) throw UsageError("--d and --m must be at least 1");
  int levels = 6;
  long long samples = 100000;
  std::uint64_t seed = 1;
  // A bare --oracle leaves one empty entry.
  std::vector<std::string> given;
  for (const auto& s : a.oracle)
    if (!s.empty()) given.push_back(s);
  auto parse = [](const std::string& s, auto& v) {
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size())
      throw UsageError("--oracle expects integers: levels samples seed");
  };
  if (given.size() > 0) parse(given[0], levels);
  if (given.size() > 1) parse(given[1], samples);
  if (given.size() > 2) parse(given[2], seed);
  if (a.with_oracle && (levels < 0 || levels > 20 || samples < 2))
    throw UsageError("--oracle needs 0 <= levels <= 20 and samples >= 2");

  const auto basis = wcub::enumerate_basis(a.d, a.m);
  const auto exact = wcub::analytic_moments(basis);
  std::ostringstream csv;
  std::vector<std::string> flagged;
  if (!a.with_oracle) {
    wcub::write_moments_csv(csv, exact);
  } else {
    const auto mc = wcub::mc_moments(basis, levels, samples, seed);
    csv << "word,degree,value,stderr,mc_value,mc_stderr,flag\n";
    for (std::size_t i = 0; i < basis->size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      const double dev = std::abs(mc.values[k] - exact.values[k]);
      const bool flag = dev > 4.0 * mc.stderrs[k] + 1e-12;
      if (flag) flagged.push_back((*basis)[i].to_string());
      csv << wcub::csv_escape((*basis)[i].to_string()) << ',' << basis->degree(i) << ',' << num(exact.values[k])
          << ",," << num(mc.values[k]) << ',' << num(mc.stderrs[k]) << ',' << (flag ? "beyond-4se" : "") << '\n';
    }
  }

  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    const std::string manifest_path = a.out + ".manifest.json";
    Manifest manifest("moments", {{"d", a.d},
                                  {"m", a.m},
                                  {"oracle", a.with_oracle},
                                  {"levels", levels},
                                  {"samples", samples},
                                  {"out", a.out}});
    manifest.seed(seed);
    manifest.artifact(a.out);
    make_parent(a.out);
    std::ofstream f(a.out);
    if (!f) throw std::runtime_error("cannot write '" + a.out + "'");
    f << "# manifest: " << std::filesystem::path(manifest_path).filename().string() << '\n' << csv.str();
    manifest.write(manifest_path);
  }
  if (a.with_oracle) {
    if (flagged.empty()) {
      std::cerr << "oracle: no word deviates beyond 4 standard errors\n";
    } else {
      std::cerr << "oracle: " << flagged.size() << " word(s) beyond 4 standard errors:";
      for (const auto& w : flagged) std::cerr << ' ' << w;
      std::cerr << '\n';
    }
  }
  return ok;
}

// ---- weak-approx ----

struct WeakArgs {
  std::string formula;
  std::string sde = "gbm";
  std::vector<double> x0;
  std::string f = "x1";
  double T = 1.0;
  std::vector<int> ks{2, 4, 8, 16, 32};
  double gamma = 1.0;
  std::string mode = "exact";
  std::uint64_t budget = wcub::kDefaultLeafBudget;
  int substeps = wcub::kDefaultSubsteps;
  std::uint64_t seed = 0;
  std::optional<double> reference;
  std::string csv;
};

wcub::VectorFieldSystem load_system(const std::string& name) {
  if (wcub::is_builtin_system(name)) return wcub::builtin_system(name);
  std::ifstream in(name);
  if (!in) {
    std::string known;
    for (const auto& n : wcub::builtin_system_names()) known += (known.empty() ? "" : ", ") + n;
    throw UsageError("unknown SDE '" + name + "' (not a file; built-ins: " + known + ")");
  }
  std::stringstream text;
  text << in.rdbuf();
  try {
    return wcub::parse_system(text.str());
  } catch (const wcub::ParseError& e) {
    throw UsageError(name + ": " + e.what());
  }
}

int cmd_weak_approx(const WeakArgs& a) {
  const auto sys = load_system(a.sde);
  wcub::CubatureFormula formula;
  if (a.formula == "degree3") {
    formula = wcub::degree3_formula(sys.driving_dim());
  } else {
    if (!std::filesystem::exists(a.formula)) throw UsageError("formula file '" + a.formula + "' does not exist");
    formula = wcub::read_formula(a.formula);
  }
  if (formula.d != sys.driving_dim())
    throw UsageError(fmt("dimension mismatch: the formula has d=%d but the SDE is driven by d=%d Brownian motions",
                         formula.d, sys.driving_dim()));
  Eigen::VectorXd x0 = Eigen::VectorXd::Ones(sys.state_dim());
  if (!a.x0.empty()) {
    if (static_cast<int>(a.x0.size()) != sys.state_dim())
      throw UsageError(fmt("dimension mismatch: --x0 has %zu entries but the SDE state has N=%d", a.x0.size(),
                           sys.state_dim()));
    x0 = Eigen::Map<const Eigen::VectorXd>(a.x0.data(), static_cast<Eigen::Index>(a.x0.size()));
  }
  wcub::Expression f;
  try {
    f = wcub::parse_expression(a.f, sys.state_dim());
  } catch (const wcub::ParseError& e) {
    throw UsageError("--f: " + std::string(e.what()));
  }
  if (a.ks.empty()) throw UsageError("--k-list is empty");
  for (int k : a.ks)
    if (k < 1) throw UsageError("--k-list values must be at least 1");
  if (!(a.T > 0.0)) throw UsageError("--T must be positive");
  if (!(a.gamma >= 1.0)) throw UsageError("--gamma must be at least 1");
  if (a.substeps < 1) throw UsageError("--substeps must be at least 1");

  wcub::TreeOptions opts;
  opts.mode = wcub::parse_tree_mode(a.mode);
  opts.budget = a.budget;
  opts.seed = a.seed;
  opts.substeps = a.substeps;

  std::vector<wcub::ConvergenceRow> rows;
  double slope = std::nan("");
  if (a.reference) {
    auto study = wcub::convergence_study(formula, sys, x0, f, a.T, a.ks, a.gamma, *a.reference, opts);
    rows = std::move(study.rows);
    slope = study.slope;
  } else {
    for (int k : a.ks) {
      wcub::ConvergenceRow r;
      r.k = k;
      r.eval = wcub::tree_expectation(formula, sys, x0, f, wcub::make_partition(a.T, k, a.gamma), opts);
      r.value = r.eval.value;
      r.error = std::nan("");
      rows.push_back(r);
    }
  }

  const bool sampled = opts.mode == wcub::TreeMode::sampled;
  std::printf("weak-approx sde=%s formula=%s (d=%d m=%d, %zu paths) mode=%s gamma=%g T=%g\n", a.sde.c_str(),
              a.formula.c_str(), formula.d, formula.m, formula.size(), a.mode.c_str(), a.gamma, a.T);
  std::printf("%6s  %-36s  %-10s  %s\n", "k", sampled ? "value (mean +- stderr)" : "value", "error", "solves");
  for (const auto& r : rows) {
    const std::string value = sampled ? fmt("%.10f +- %.2e", r.value, r.eval.stderr_) : fmt("%.15f", r.value);
    const std::string error = std::isnan(r.error) ? "-" : fmt("%.3e", r.error);
    std::printf("%6d  %-36s  %-10s  %llu\n", r.k, value.c_str(), error.c_str(),
                static_cast<unsigned long long>(r.eval.ode_solves));
  }
  if (a.reference) std::printf("slope: %.3f\n", slope);

  if (!a.csv.empty()) {
    const std::string manifest_path = a.csv + ".manifest.json";
    nlohmann::json params = {{"formula", a.formula}, {"sde", a.sde},         {"x0", std::vector<double>(x0.data(), x0.data() + x0.size())},
                             {"f", a.f},             {"T", a.T},             {"k_list", a.ks},
                             {"gamma", a.gamma},     {"mode", a.mode},       {"budget", a.budget},
                             {"substeps", a.substeps}, {"csv", a.csv}};
    if (a.reference) params["reference"] = *a.reference;
    Manifest manifest("weak-approx", params);
    manifest.seed(a.seed);
    manifest.artifact(a.csv);
    make_parent(a.csv);
    std::ofstream out(a.csv);
    if (!out) throw std::runtime_error("cannot write '" + a.csv + "'");
    out << "# manifest: " << std::filesystem::path(manifest_path).filename().string() << '\n';
    out << "k,value,stderr,error,solves,leaves,samples\n";
    for (const auto& r : rows)
      out << r.k << ',' << num(r.value) << ',' << (sampled ? num(r.eval.stderr_) : "") << ','
          << (std::isnan(r.error) ? "" : num(r.error)) << ',' << r.eval.ode_solves << ',' << r.eval.leaves << ','
          << r.eval.samples << '\n';
    manifest.write(manifest_path);
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cubature formulas on Wiener space: construction, verification, moments, weak approximation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", WCUB_VERSION);

  ConstructArgs ca;
  auto* construct = app.add_subcommand("construct", "sample candidate paths and solve the moment LP");
  construct->add_option("--d", ca.d, "number of Brownian motions")->required();
  construct->add_option("--m", ca.m, "degree")->required();
  construct->add_option("--M", ca.M, "segments per candidate path (comma list)")->delimiter(',');
  construct->add_option("--N-factor", ca.factors, "candidates as multiples of |A(m)| (comma list)")->delimiter(',');
  construct->add_option("--scheme", ca.scheme, "path sampling scheme")->check(CLI::IsMember({"a", "b"}));
  construct->add_option("--seed", ca.seed, "seed of trial 0; trial t uses seed + t");
  construct->add_option("--trials", ca.trials, "trials per grid cell");
  construct->add_option("--out", ca.out, "directory for formula files and the manifest");

  std::string verify_file;
  double verify_tol = 2.0 * wcub::kFeasibilityTolerance;
  auto* verify = app.add_subcommand("verify", "recompute the moments of a formula file");
  verify->add_option("--formula", verify_file, "formula JSON")->required();
  verify->add_option("--tol", verify_tol, "maximum moment residual");

  MomentsArgs ma;
  auto* moments = app.add_subcommand("moments", "expected signature of Brownian motion as CSV");
  moments->add_option("--d", ma.d)->required();
  moments->add_option("--m", ma.m)->required();
  auto* oracle = moments->add_option("--oracle", ma.oracle, "Monte Carlo check: levels samples seed (default 6 100000 1)")
                     ->expected(0, 3);
  moments->add_option("--out", ma.out, "CSV file (default stdout)");

  WeakArgs wa;
  double reference = 0.0;
  auto* weak = app.add_subcommand("weak-approx", "cubature tree approximation of E[f(X_T)]");
  weak->add_option("--formula", wa.formula, "formula JSON, or 'degree3'")->required();
  weak->add_option("--sde", wa.sde, "built-in name or system file");
  weak->add_option("--x0", wa.x0, "initial state (comma list, default all ones)")->delimiter(',');
  weak->add_option("--f", wa.f, "functional of x1..xN");
  weak->add_option("--T", wa.T, "horizon");
  weak->add_option("--k-list", wa.ks, "step counts (comma list)")->delimiter(',');
  weak->add_option("--gamma", wa.gamma, "partition grading");
  weak->add_option("--mode", wa.mode, "tree evaluation")->check(CLI::IsMember({"exact", "sampled", "affine"}));
  weak->add_option("--budget", wa.budget, "exact: leaf limit; sampled: samples");
  weak->add_option("--substeps", wa.substeps, "RK4 substeps per segment");
  weak->add_option("--seed", wa.seed, "seed for sampled mode");
  auto* ref = weak->add_option("--reference", reference, "exact value; enables errors and the slope");
  weak->add_option("--csv", wa.csv, "CSV dump");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    if (*construct) return cmd_construct(ca);
    if (*verify) return cmd_verify(verify_file, verify_tol);
    if (*moments) {
      ma.with_oracle = oracle->count() > 0;
      return cmd_moments(ma);
    }
    if (*weak) {
      if (ref->count() > 0) wa.reference = reference;
      return cmd_weak_approx(wa);
    }
  } catch (const UsageError& e) {
    std::cerr << "wcub: error: " << e.what() << '\n';
    return usage;
  } catch (const wcub::BudgetExceeded& e) {
    std::cerr << "wcub: error: " << e.what() << " (raise --budget or use --mode sampled)\n";
    return usage;
  } catch (const wcub::NotAffine& e) {
    std::cerr << "wcub: error: " << e.what() << '\n';
    return usage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "wcub: error: " << e.what() << '\n';
    return usage;
  } catch (const std::exception& e) {
    std::cerr << "wcub: numerical failure: " << e.what() << '\n';
    return numerical;
  }
  return usage;
}
