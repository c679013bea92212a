#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cssir/covariance.hpp"
#include "cssir/solver.hpp"

namespace cssir {

/// Diagonal entries of Pi_hat above this count as selected. Soft-thresholding
/// produces exact zeros, so the cutoff only absorbs rounding.
inline constexpr double kDefaultSupportThreshold = 1e-6;

struct FitResult {
  SymMatrix pi_hat;
  Matrix directions;  // d x K, top-K eigenvectors of pi_hat
  Vector eigenvalues;  // the matching K eigenvalues
  std::vector<Index> support;  // 0-based, {j : pi_hat(j, j) > threshold}
  Index k = 1;
  double rho = 0.0;
  SolveReport report;
};

/// Directions and support from a solved Pi_hat.
FitResult summarize_fit(SolveReport report, const SolverConfig& cfg, double support_threshold = kDefaultSupportThreshold);

/// Sparse SIR: M = sample_cov(x) - T, Sigma = sample_cov(x).
FitResult fit_sir(const Dataset& data, const SolverConfig& cfg,
                  const ConditionalMethod& method = ConditionalMethod::sliced(5),
                  double support_threshold = kDefaultSupportThreshold);

/// Sparse PFC: M = fit_cov(data, basis). Requires K < r.
FitResult fit_pfc(const Dataset& data, const SolverConfig& cfg, const BasisSpec& basis,
                  double support_threshold = kDefaultSupportThreshold);

/// Gaussian-kernel (unit bandwidth) conditional mean on the reduced
/// predictors R(x) = directions^T x.
class MeanPredictor {
 public:
  MeanPredictor(const Matrix& directions, const Dataset& train);

  /// Normalized weights w_i(x*). When every exp(-|dR|^2/2) underflows to 0,
  /// all weight goes to the nearest training point (first on ties).
  Vector weights(const Vector& x_star) const;
  /// sum_i w_i y_i, evaluated as y_0 + sum_i w_i (y_i - y_0) so that a
  /// constant response is returned exactly.
  double predict(const Vector& x_star) const;

 private:
  Matrix directions_;
  Matrix reduced_;  // n x K
  Vector y_;
};

double predict_mean(const FitResult& fit, const Dataset& train, const Vector& x_star);

/// `count` log-spaced values spanning [0.01, 4] * sqrt(log d / n), descending.
std::vector<double> default_rho_grid(Index n, Index d, int count = 20);

struct CvOptions {
  std::vector<Index> k_grid{1, 2, 3};
  std::vector<double> rho_grid;  // empty: default_rho_grid(n, d)
  int folds = 5;
  std::uint64_t seed = 1;
  ConditionalMethod method = ConditionalMethod::sliced(5);
  std::optional<BasisSpec> basis;  // set for PFC
  SolverConfig solver;             // rho and k are overridden per grid point
  double support_threshold = kDefaultSupportThreshold;
  std::vector<int> fold_of;  // optional explicit assignment, one fold id per row
};

struct CvReport {
  std::vector<std::pair<Index, double>> grid;  // (K, rho)
  std::vector<double> errors;                  // mean prediction error per grid point
  std::vector<std::vector<double>> fold_errors;  // [grid point][fold]
  std::pair<Index, double> best{1, 0.0};
  int folds = 0;
};

/// Fold ids from contiguous blocks of a seeded random permutation.
std::vector<int> assign_folds(Index n, int folds, std::uint64_t seed);

/// M-fold cross-validation of the prediction error
///   sum_m sum_{i in C_m} (y_i - E_hat(y | x_i))^2 / (M |C_m|).
/// For each fold and K, the rho path is solved largest to smallest with warm
/// starts. Ties go to the smaller K, then the larger rho.
CvReport cross_validate(const Dataset& data, const CvOptions& options);

}  // namespace cssir
