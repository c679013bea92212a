#pragma once

#include <optional>
#include <vector>

#include "cssir/linalg.hpp"

namespace cssir {

struct SolverConfig {
  double rho = 0.0;       // l1 penalty
  Index k = 1;            // trace bound on Sigma^{1/2} Pi Sigma^{1/2}
  double nu = 0.1;        // augmented-Lagrangian weight; does not move the optimum
  double epsilon = 1e-4;  // stop when the Pi and Gamma steps are both <= epsilon
  int max_iter = 2000;

  void validate(Index d) const;
};

/// Iterates of the linearized ADMM: primal Pi, split variable H = S Pi S
/// (S = Sigma^{1/2}) and the scaled dual Gamma.
struct SolverState {
  SymMatrix pi;
  SymMatrix h;
  SymMatrix gamma;
  int iter = 0;
  double last_step_norm = 0.0;

  /// Pi = H = I, Gamma = 0.
  static SolverState initial(Index d);
};

struct SolveReport {
  SymMatrix pi_hat;
  bool converged = false;
  int iterations = 0;
  double final_step_norm = 0.0;
  double final_residual_norm = 0.0;  // ||Gamma_t - Gamma_{t-1}||_F = ||S Pi S - H||_F
  std::vector<double> objective_trace;  // -tr(M Pi) + rho ||Pi||_1 per iteration
  SolverState final_state;
};

/// Linearized ADMM for
///   minimize -tr(M Pi) + rho ||Pi||_1
///   s.t. ||S Pi S||_* <= K, ||S Pi S||_sp <= 1,  S = Sigma^{1/2}.
/// The square root and tau = 4 nu lambda_max(Sigma)^2 are computed once, so
/// one instance can serve a whole rho path.
///
/// When Sigma has rank r < d (always the case for n <= d), S Pi S, H and Gamma
/// all lie in range(S) after the first sweep, so H and Gamma are carried as
/// r x r blocks in the eigenbasis of Sigma and the Fantope projection runs on
/// r x r matrices. Eigenvalues of Sigma at or below 1e-12 lambda_max are
/// rounding noise and count as zero.
class LadmmSolver {
 public:
  LadmmSolver(SymMatrix m, const SymMatrix& sigma, double nu = 0.1);

  double tau() const noexcept { return tau_; }
  double nu() const noexcept { return nu_; }
  Index dim() const noexcept { return m_.dim(); }
  const SymMatrix& sqrt_sigma() const noexcept { return s_; }

  /// Runs until both the Pi step and the Gamma step are at most cfg.epsilon in
  /// Frobenius norm, or cfg.max_iter. `warm` replaces the identity start.
  SolveReport solve(const SolverConfig& cfg, const std::optional<SolverState>& warm = std::nullopt) const;

  /// One sweep of the Pi, H and Gamma updates.
  SolverState step(const SolverState& state, const SolverConfig& cfg) const;

  double objective(const SymMatrix& pi, double rho) const;

 private:
  struct Reduced {
    Matrix pi;     // d x d
    Matrix h;      // r x r
    Matrix gamma;  // r x r
    Matrix w;      // factor_^T pi factor_, r x r
  };

  Reduced compress(const SolverState& state) const;
  SolverState expand(const Reduced& state, int iter, double step_norm) const;
  struct Sweep {
    double step;      // ||Pi_new - Pi_old||_F
    double residual;  // ||Gamma_new - Gamma_old||_F
  };
  // One sweep in place.
  Sweep sweep(Reduced& state, const SolverConfig& cfg) const;

  SymMatrix m_;
  SymMatrix s_;
  double nu_;
  double tau_;
  // S Pi S = basis_ (factor_^T Pi factor_) basis_^T. With full rank, factor_ = S
  // and basis_ is empty (identity).
  Matrix factor_;
  Matrix basis_;
};

SolveReport ladmm_solve(const SymMatrix& m, const SymMatrix& sigma, const SolverConfig& cfg);

}  // namespace cssir
