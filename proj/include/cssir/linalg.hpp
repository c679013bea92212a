#pragma once

#include <Eigen/Dense>

#include "cssir/error.hpp"

namespace cssir {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense symmetric matrix. Any input is stored as (A + A^T) / 2, so the
/// stored entries are exactly symmetric.
class SymMatrix {
 public:
  SymMatrix() = default;  // 0 x 0
  explicit SymMatrix(const Matrix& a);

  static SymMatrix identity(Index d);
  static SymMatrix zero(Index d);
  static SymMatrix diagonal(const Vector& diag);

  Index dim() const noexcept { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  const Matrix& matrix() const noexcept { return m_; }
  double trace() const { return m_.trace(); }
  bool all_finite() const { return m_.allFinite(); }

 private:
  Matrix m_;
};

/// Spectral decomposition A = U diag(values) U^T with values non-increasing.
struct EigenDecomposition {
  Vector values;
  Matrix vectors;

  Matrix reconstruct() const;
};

EigenDecomposition sym_eigen(const SymMatrix& a);

/// U max(L, 0)^{1/2} U^T. Eigenvalues in [-1e-6 max(1, l_max), 0) are treated
/// as rounding noise and clamped; anything more negative raises kNotPsd.
SymMatrix sqrt_psd(const SymMatrix& a);
SymMatrix sqrt_psd(const EigenDecomposition& eig);

SymMatrix soft_threshold(const SymMatrix& a, double b);

struct MatrixNorms {
  double frobenius = 0.0;
  double spectral = 0.0;
  double nuclear = 0.0;
  double max = 0.0;
  double l1 = 0.0;
};

MatrixNorms norms(const SymMatrix& a);

/// Lower-triangular L with L L^T = A.
Matrix cholesky(const SymMatrix& a);

}  // namespace cssir
