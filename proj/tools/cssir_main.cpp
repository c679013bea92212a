// Command-line front end: simulate data, fit, tune and run benchmarks.
//
// Exit codes: 0 success, 1 numerical or I/O failure, 2 usage error.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cssir/benchmark.hpp"
#include "cssir/io.hpp"
#include "cssir/sdr.hpp"
#include "cssir/simulate.hpp"

namespace fs = std::filesystem;
using cssir::io::Json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

cssir::ConditionalMethod parse_method(const std::string& text) {
  if (text == "diff") return cssir::ConditionalMethod::difference();
  if (text.rfind("slice:", 0) == 0) {
    try {
      const long h = std::stol(text.substr(6));
      if (h >= 1) return cssir::ConditionalMethod::sliced(h);
    } catch (const std::exception&) {
    }
  }
  throw UsageError("--method must be 'diff' or 'slice:H' with H >= 1, got '" + text + "'");
}

std::optional<cssir::BasisSpec> parse_basis(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  long order = 0;
  try {
    if (colon != std::string::npos) order = std::stol(text.substr(colon + 1));
  } catch (const std::exception&) {
  }
  if (order >= 1 && kind == "poly") return cssir::BasisSpec{cssir::BasisSpec::Kind::kPolynomial, order};
  if (order >= 1 && kind == "slice") return cssir::BasisSpec{cssir::BasisSpec::Kind::kSliceIndicator, order};
  throw UsageError("--pfc-basis must be 'poly:r' or 'slice:r' with r >= 1, got '" + text + "'");
}

int default_parallelism() {
  if (const char* env = std::getenv("CSSIR_PARALLEL")) {
    try {
      const int p = std::stoi(env);
      if (p >= 1) return p;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_manifest(const fs::path& path, const std::string& command, Json config, const std::vector<fs::path>& outputs) {
  Json files = Json::array();
  for (const auto& p : outputs) files.push_back(p.string());
  const Json manifest{{"tool", "cssir"},     {"version", kVersion}, {"command", command},
                      {"rng", cssir::Rng::kRngName}, {"timestamp", utc_timestamp()}, {"config", std::move(config)},
                      {"outputs", std::move(files)}};
  cssir::io::write_text(path, manifest.dump(2) + "\n");
}

fs::path sibling(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_extension();
  return fs::path(p.string() + suffix);
}

struct SolverFlags {
  double rho = 0.0;
  long k = 1;
  double nu = 0.1;
  double eps = 1e-4;
  int max_iter = 2000;
  std::string method = "slice:5";
  std::string basis;
  double support_threshold = cssir::kDefaultSupportThreshold;

  void add(CLI::App* app, bool with_rho_k) {
    if (with_rho_k) {
      app->add_option("--rho", rho, "l1 penalty")->check(CLI::NonNegativeNumber)->capture_default_str();
      app->add_option("--k", k, "subspace dimension K")->check(CLI::PositiveNumber)->capture_default_str();
    }
    app->add_option("--nu", nu, "ADMM parameter nu")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--eps", eps, "stopping tolerance on ||Pi_t - Pi_{t-1}||_F")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--max-iter", max_iter, "iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--method", method, "conditional covariance: diff | slice:H")->capture_default_str();
    app->add_option("--pfc-basis", basis, "fit principal fitted components with basis poly:r | slice:r");
    app->add_option("--support-threshold", support_threshold, "diag(Pi) cutoff for the support")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
  }

  cssir::SolverConfig config() const {
    cssir::SolverConfig cfg;
    cfg.rho = rho;
    cfg.k = k;
    cfg.nu = nu;
    cfg.epsilon = eps;
    cfg.max_iter = max_iter;
    return cfg;
  }

  Json to_json() const {
    Json j = cssir::io::solver_config_to_json(config());
    j["method"] = method;
    j["pfc_basis"] = basis.empty() ? Json(nullptr) : Json(basis);
    j["support_threshold"] = support_threshold;
    return j;
  }
};

struct GridFlags {
  std::vector<long> k_grid{1, 2, 3};
  std::vector<double> rho_grid;
  int rho_count = 20;
  int folds = 5;
  std::uint64_t seed = 1;

  void add(CLI::App* app, const std::string& seed_flag = "--seed") {
    app->add_option("--k-grid", k_grid, "candidate K values")->delimiter(',')->capture_default_str();
    app->add_option("--rho-grid", rho_grid, "candidate rho values (default: log-spaced)")->delimiter(',');
    app->add_option("--rho-count", rho_count, "size of the default rho grid")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--folds", folds, "number of folds M")->check(CLI::Range(2, 1000000))->capture_default_str();
    app->add_option(seed_flag, seed, "fold permutation seed")->capture_default_str();
  }

  cssir::CvOptions options(const SolverFlags& solver, cssir::Index n, cssir::Index d) const {
    cssir::CvOptions cv;
    cv.k_grid.assign(k_grid.begin(), k_grid.end());
    cv.rho_grid = rho_grid.empty() ? cssir::default_rho_grid(n, d, rho_count) : rho_grid;
    cv.folds = folds;
    cv.seed = seed;
    cv.method = parse_method(solver.method);
    cv.basis = parse_basis(solver.basis);
    cv.solver = solver.config();
    cv.support_threshold = solver.support_threshold;
    return cv;
  }

  Json to_json(const cssir::CvOptions& cv) const {
    return Json{{"k_grid", cv.k_grid}, {"rho_grid", cv.rho_grid}, {"folds", cv.folds}, {"seed", cv.seed}};
  }
};

void print_summary(const cssir::ReplicateTable& table) {
  std::cout << std::fixed << std::setprecision(2);
  for (const auto& [name, s] : table.summary) {
    const bool pct = name == "tpr" || name == "fpr" || name == "corr";
    const double scale = pct ? 100.0 : 1.0;
    std::cout << "  " << std::setw(10) << std::left << name << std::right << std::setw(10) << s.mean * scale;
    if (s.se) std::cout << " (" << *s.se * scale << ")";
    std::cout << (pct ? "  x100" : "") << "\n";
  }
  if (table.failures > 0) std::cout << "  failed replicates: " << table.failures << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex sparse sliced inverse regression"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Draw a dataset from one of the three regression settings");
  cssir::SimSpec sim_spec;
  fs::path sim_out;
  fs::path sim_truth;
  sim->add_option("--setting", sim_spec.setting, "regression setting")->check(CLI::Range(1, 3))->capture_default_str();
  sim->add_option("--n", sim_spec.n, "observations")->check(CLI::Range(2L, 100000000L))->capture_default_str();
  sim->add_option("--d", sim_spec.d, "covariates")->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--seed", sim_spec.seed, "RNG seed")->capture_default_str();
  sim->add_option("--out", sim_out, "CSV output path")->required();
  sim->add_option("--truth", sim_truth, "truth sidecar JSON (default: <out>.truth.json)");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit sparse SIR (or sparse PFC) on a CSV dataset");
  fs::path fit_data;
  fs::path fit_out;
  fs::path fit_dump;
  SolverFlags fit_flags;
  fit->add_option("--data", fit_data, "CSV dataset")->required()->check(CLI::ExistingFile);
  fit->add_option("--out", fit_out, "JSON result path")->required();
  fit->add_option("--dump-pi", fit_dump, "also write the full Pi_hat in binary");
  fit_flags.add(fit, true);

  // tune
  auto* tune = app.add_subcommand("tune", "Select (K, rho) by M-fold cross-validation");
  fs::path tune_data;
  fs::path tune_out;
  SolverFlags tune_flags;
  GridFlags tune_grid;
  tune->add_option("--data", tune_data, "CSV dataset")->required()->check(CLI::ExistingFile);
  tune->add_option("--out", tune_out, "JSON report path")->required();
  tune_flags.add(tune, false);
  tune_grid.add(tune);

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Simulation benchmarks");
  bench->require_subcommand(1);
  int parallel = default_parallelism();

  auto* table1 = bench->add_subcommand("table1", "CV-tuned support recovery and score correlation");
  cssir::SimSpec t1_spec;
  int t1_replicates = 200;
  fs::path t1_prefix = "table1";
  SolverFlags t1_flags;
  GridFlags t1_grid;
  table1->add_option("--setting", t1_spec.setting)->check(CLI::Range(1, 3))->capture_default_str();
  table1->add_option("--n", t1_spec.n)->check(CLI::Range(2L, 100000000L))->capture_default_str();
  table1->add_option("--d", t1_spec.d)->check(CLI::PositiveNumber)->capture_default_str();
  table1->add_option("--replicates", t1_replicates)->check(CLI::PositiveNumber)->capture_default_str();
  table1->add_option("--seed", t1_spec.seed, "base seed; replicate r uses seed + r")->capture_default_str();
  table1->add_option("--parallel", parallel, "replicate threads (env CSSIR_PARALLEL)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  table1->add_option("--out-prefix", t1_prefix, "output path prefix")->capture_default_str();
  t1_flags.add(table1, false);
  t1_grid.add(table1, "--cv-seed");

  auto* fig1 = bench->add_subcommand("fig1", "Subspace distance against sqrt(log d / n), rho = 2 sqrt(log d / n)");
  cssir::ScalingOptions f1;
  fs::path f1_prefix = "fig1";
  SolverFlags f1_flags;
  fig1->add_option("--setting", f1.setting)->check(CLI::Range(1, 3))->capture_default_str();
  fig1->add_option("--d-list", f1.d_values)->delimiter(',')->capture_default_str();
  fig1->add_option("--n-list", f1.n_values)->delimiter(',')->capture_default_str();
  fig1->add_option("--replicates", f1.replicates)->check(CLI::PositiveNumber)->capture_default_str();
  fig1->add_option("--seed", f1.seed)->capture_default_str();
  fig1->add_option("--parallel", parallel, "replicate threads (env CSSIR_PARALLEL)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fig1->add_option("--out-prefix", f1_prefix, "output path prefix")->capture_default_str();
  f1_flags.add(fig1, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*sim) {
      const auto [data, truth] = cssir::generate(sim_spec);
      if (sim_truth.empty()) sim_truth = sibling(sim_out, ".truth.json");
      cssir::io::write_dataset_csv(sim_out, data);
      cssir::io::write_text(sim_truth, cssir::io::truth_to_json(truth, sim_spec).dump(2) + "\n");
      const Json config{{"setting", sim_spec.setting}, {"n", sim_spec.n}, {"d", sim_spec.d}, {"seed", sim_spec.seed}};
      write_manifest(sibling(sim_out, ".manifest.json"), "simulate", config, {sim_out, sim_truth});
      std::cout << "wrote " << data.n() << " rows x " << data.d() << " covariates to " << sim_out.string() << "\n";
    } else if (*fit) {
      const cssir::Dataset data = cssir::io::read_dataset_csv(fit_data);
      const cssir::SolverConfig cfg = fit_flags.config();
      if (cfg.k > data.d()) throw UsageError("--k must not exceed the number of covariates");
      const auto basis = parse_basis(fit_flags.basis);
      const auto method = parse_method(fit_flags.method);
      const cssir::FitResult result = basis ? cssir::fit_pfc(data, cfg, *basis, fit_flags.support_threshold)
                                            : cssir::fit_sir(data, cfg, method, fit_flags.support_threshold);
      Json out = cssir::io::fit_to_json(result);
      out["method"] = basis ? "pfc:" + basis->describe() : method.describe();
      cssir::io::write_text(fit_out, out.dump(2) + "\n");
      std::vector<fs::path> outputs{fit_out};
      if (!fit_dump.empty()) {
        cssir::io::write_pi_binary(fit_dump, result.pi_hat);
        outputs.push_back(fit_dump);
      }
      Json config = fit_flags.to_json();
      config["data"] = fit_data.string();
      write_manifest(sibling(fit_out, ".manifest.json"), "fit", config, outputs);
      std::cout << "support (" << result.support.size() << "):";
      for (auto j : result.support) std::cout << " x" << j + 1;
      std::cout << "\n" << (result.report.converged ? "converged" : "NOT converged") << " after "
                << result.report.iterations << " iterations\n";
    } else if (*tune) {
      const cssir::Dataset data = cssir::io::read_dataset_csv(tune_data);
      const cssir::CvOptions cv = tune_grid.options(tune_flags, data.n(), data.d());
      const cssir::CvReport report = cssir::cross_validate(data, cv);
      cssir::io::write_text(tune_out, cssir::io::cv_to_json(report).dump(2) + "\n");
      Json config = tune_flags.to_json();
      config["data"] = tune_data.string();
      config["cv"] = tune_grid.to_json(cv);
      write_manifest(sibling(tune_out, ".manifest.json"), "tune", config, {tune_out});
      std::cout << "selected K=" << report.best.first << " rho=" << report.best.second << "\n";
    } else if (*table1) {
      t1_spec.validate();
      const cssir::CvOptions cv = t1_grid.options(t1_flags, t1_spec.n, t1_spec.d);
      const cssir::ReplicateTable table =
          cssir::run_replicates(t1_spec, t1_replicates, cssir::table1_pipeline(cv), parallel);
      const fs::path rows = t1_prefix.string() + "_replicates.csv";
      const fs::path summary = t1_prefix.string() + "_summary.csv";
      cssir::io::write_text(rows, cssir::io::replicate_table_csv(table));
      cssir::io::write_text(summary, cssir::io::summary_csv(table));
      Json config = t1_flags.to_json();
      config["setting"] = t1_spec.setting;
      config["n"] = t1_spec.n;
      config["d"] = t1_spec.d;
      config["seed"] = t1_spec.seed;
      config["replicates"] = t1_replicates;
      config["parallel"] = parallel;
      config["cv"] = t1_grid.to_json(cv);
      write_manifest(t1_prefix.string() + ".manifest.json", "benchmark table1", config, {rows, summary});
      std::cout << "setting " << t1_spec.setting << ", n=" << t1_spec.n << ", d=" << t1_spec.d << ", "
                << t1_replicates << " replicates\n";
      print_summary(table);
    } else if (*fig1) {
      f1.solver = f1_flags.config();
      f1.method = parse_method(f1_flags.method);
      f1.parallelism = parallel;
      const auto points = cssir::run_scaling(f1);
      const fs::path csv = f1_prefix.string() + "_scaling.csv";
      cssir::io::write_text(csv, cssir::io::scaling_csv(points));
      Json config = f1_flags.to_json();
      config["setting"] = f1.setting;
      config["d_list"] = f1.d_values;
      config["n_list"] = f1.n_values;
      config["replicates"] = f1.replicates;
      config["seed"] = f1.seed;
      config["parallel"] = parallel;
      config["rho_rule"] = "2*sqrt(log(d)/n)";
      write_manifest(f1_prefix.string() + ".manifest.json", "benchmark fig1", config, {csv});
      std::cout << std::setprecision(4);
      for (const auto& p : points) {
        std::cout << "d=" << p.d << " n=" << p.n << " x=" << p.x << " distance=" << p.mean << " (" << p.se << ")\n";
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const cssir::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case cssir::ErrorKind::kInvalidParameter:
      case cssir::ErrorKind::kInvalidRank:
      case cssir::ErrorKind::kInvalidFold:
      case cssir::ErrorKind::kInvalidSlicing:
        return kExitUsage;
      default:
        return kExitNumerical;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
