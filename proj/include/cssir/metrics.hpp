#pragma once

#include <vector>

#include "cssir/linalg.hpp"

namespace cssir {

struct SupportEval {
  double tpr = 0.0;
  double fpr = 0.0;
};

/// Supports are 0-based covariate indices in [0, d).
SupportEval support_rates(const std::vector<Index>& true_support, const std::vector<Index>& est_support, Index d);

/// For each true direction, the largest |Pearson correlation| between its
/// scores X b and the scores of any estimated direction; averaged over the
/// true directions.
double score_correlation(const Matrix& x, const Matrix& true_dirs, const Matrix& est_dirs);

/// ||U U^T - W W^T||_F for column-orthonormal U and W of equal width.
double subspace_distance(const Matrix& u, const Matrix& w);

/// Orthonormal basis for the column span of a full-column-rank matrix.
Matrix orthonormal_basis(const Matrix& a);

}  // namespace cssir
