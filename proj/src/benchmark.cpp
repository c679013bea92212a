#include "cssir/benchmark.hpp"

#include <cmath>

#include "cssir/metrics.hpp"

namespace cssir {

ReplicatePipeline table1_pipeline(const CvOptions& cv) {
  return [cv](const Dataset& data, const GroundTruth& truth) {
    const CvReport report = cross_validate(data, cv);
    SolverConfig cfg = cv.solver;
    cfg.k = report.best.first;
    cfg.rho = report.best.second;
    const FitResult fit = cv.basis ? fit_pfc(data, cfg, *cv.basis, cv.support_threshold)
                                   : fit_sir(data, cfg, cv.method, cv.support_threshold);
    const SupportEval rates = support_rates(truth.support, fit.support, data.d());
    return Metrics{{"tpr", rates.tpr},
                   {"fpr", rates.fpr},
                   {"corr", score_correlation(data.x(), truth.directions, fit.directions)},
                   {"k", static_cast<double>(cfg.k)},
                   {"rho", cfg.rho},
                   {"iterations", static_cast<double>(fit.report.iterations)},
                   {"converged", fit.report.converged ? 1.0 : 0.0}};
  };
}

double theory_rho(Index n, Index d, double scale) {
  return scale * std::sqrt(std::log(static_cast<double>(d)) / static_cast<double>(n));
}

ReplicatePipeline fig1_pipeline(const SolverConfig& base, const ConditionalMethod& method) {
  return [base, method](const Dataset& data, const GroundTruth& truth) {
    SolverConfig cfg = base;
    cfg.k = truth.k;
    cfg.rho = theory_rho(data.n(), data.d());
    const FitResult fit = fit_sir(data, cfg, method);
    const SupportEval rates = support_rates(truth.support, fit.support, data.d());
    return Metrics{{"distance", subspace_distance(orthonormal_basis(truth.directions), fit.directions)},
                   {"tpr", rates.tpr},
                   {"fpr", rates.fpr},
                   {"corr", score_correlation(data.x(), truth.directions, fit.directions)},
                   {"iterations", static_cast<double>(fit.report.iterations)},
                   {"converged", fit.report.converged ? 1.0 : 0.0}};
  };
}

std::vector<ScalingPoint> run_scaling(const ScalingOptions& options) {
  const auto pipeline = fig1_pipeline(options.solver, options.method);
  std::vector<ScalingPoint> points;
  std::uint64_t cell = 0;
  for (Index d : options.d_values) {
    const double s = static_cast<double>(ground_truth(options.setting, d).support.size());
    for (Index n : options.n_values) {
      const SimSpec spec{options.setting, n, d, options.seed + 1000000ULL * cell++};
      const ReplicateTable table = run_replicates(spec, options.replicates, pipeline, options.parallelism);
      const MetricSummary& dist = table.summary.at("distance");
      points.push_back({d, n, s * std::sqrt(std::log(static_cast<double>(d)) / static_cast<double>(n)), dist.mean,
                        dist.se.value_or(0.0), dist.count});
    }
  }
  return points;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::kInvalidInput, "line fit needs two or more paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::kInvalidInput, "line fit needs distinct x values");
  LineFit out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return out;
}

}  // namespace cssir
