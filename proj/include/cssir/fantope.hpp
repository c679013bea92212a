#pragma once

#include <span>
#include <vector>

#include "cssir/linalg.hpp"

namespace cssir {

struct ClipSolution {
  double gamma_star = 0.0;
  std::vector<double> clipped_values;  // min(1, max(omega_j - gamma_star, 0))
  double achieved_trace = 0.0;
};

/// sum_j min(1, max(omega_j - gamma, 0)), non-increasing in gamma.
double clipped_trace(std::span<const double> omega, double gamma);

/// Smallest gamma >= 0 with clipped_trace(omega, gamma) <= k, found exactly by
/// locating the bracketing pair of breakpoints {omega_j, omega_j - 1} and
/// solving the linear piece between them.
ClipSolution solve_gamma(std::span<const double> omega, Index k);

/// Clip step of the projection on a raw symmetric block, allowing k > dim
/// (then only the spectral bound binds). Eigenvectors are computed only for
/// the eigenvalues that survive the clip.
Matrix fantope_clip(const Matrix& w, Index k);

/// Euclidean projection of W onto {H PSD : trace(H) <= k, ||H||_sp <= 1}.
SymMatrix project_fantope(const SymMatrix& w, Index k);

}  // namespace cssir
