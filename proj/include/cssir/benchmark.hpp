#pragma once

#include <vector>

#include "cssir/sdr.hpp"
#include "cssir/simulate.hpp"

namespace cssir {

/// Cross-validate (K, rho) on the replicate, refit on all of it, and score
/// support recovery and score correlation against the truth.
/// Metrics: tpr, fpr, corr, k, rho, iterations, converged.
ReplicatePipeline table1_pipeline(const CvOptions& cv);

/// rho = scale * sqrt(log d / n) for the replicate's (n, d).
double theory_rho(Index n, Index d, double scale = 2.0);

/// K known, rho = theory_rho(n, d). Metrics: distance, tpr, fpr, corr,
/// iterations, converged.
ReplicatePipeline fig1_pipeline(const SolverConfig& base, const ConditionalMethod& method);

struct ScalingPoint {
  Index d = 0;
  Index n = 0;
  double x = 0.0;  // s * sqrt(log d / n)
  double mean = 0.0;
  double se = 0.0;
  int replicates = 0;
};

struct ScalingOptions {
  int setting = 1;
  std::vector<Index> d_values{100, 200};
  std::vector<Index> n_values{200, 400, 800, 1600};
  int replicates = 100;
  std::uint64_t seed = 1;
  SolverConfig solver;
  ConditionalMethod method = ConditionalMethod::sliced(5);
  int parallelism = 1;
};

/// Mean subspace distance for every (d, n) cell. Cell c (d-major order) uses
/// replicate seeds seed + 1000000 c + r.
std::vector<ScalingPoint> run_scaling(const ScalingOptions& options);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y ~ a + b x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cssir
