#pragma once

#include <string>
#include <vector>

#include "cssir/linalg.hpp"

namespace cssir {

/// n paired observations (y_i, x_i). Row i of x() belongs to y()(i).
class Dataset {
 public:
  Dataset(Vector y, Matrix x);

  Index n() const noexcept { return y_.size(); }
  Index d() const noexcept { return x_.cols(); }
  const Vector& y() const noexcept { return y_; }
  const Matrix& x() const noexcept { return x_; }

  Dataset subset(const std::vector<Index>& rows) const;

 private:
  Vector y_;
  Matrix x_;
};

/// Indices that sort y ascending; ties keep their input order.
std::vector<Index> order_by_response(const Vector& y);

/// Split n ordered positions into `slices` contiguous blocks. The first
/// n mod slices blocks receive one extra point. Returns block start offsets
/// plus a final n.
std::vector<Index> slice_offsets(Index n, Index slices);

/// How the expected conditional covariance E{cov(x|y)} is estimated.
struct ConditionalMethod {
  enum class Kind { kDifference, kSlice };
  Kind kind = Kind::kSlice;
  Index slices = 5;

  static ConditionalMethod difference() { return {Kind::kDifference, 0}; }
  static ConditionalMethod sliced(Index h) { return {Kind::kSlice, h}; }

  std::string describe() const;
};

struct BasisSpec {
  enum class Kind { kPolynomial, kSliceIndicator };
  Kind kind = Kind::kPolynomial;
  Index order = 1;

  std::string describe() const;
};

struct BasisMatrix {
  Matrix f;  // n x r, columns centered
  bool rank_deficient = false;
  std::vector<std::string> warnings;
};

/// Centered covariance with 1/n normalization.
SymMatrix sample_cov(const Matrix& x);

/// Pairwise-difference estimator: consecutive concomitants of the sorted
/// response are paired, the unpaired largest-y point is dropped for odd n.
SymMatrix diff_estimator_t(const Dataset& data);

/// Equal-weight average over H order-statistic slices of the within-slice
/// 1/n_h covariance.
SymMatrix slice_estimator_t(const Dataset& data, Index slices);

/// sample_cov(x) - T for the chosen T estimator. Not clamped to PSD.
SymMatrix conditional_cov(const Dataset& data, const ConditionalMethod& method);

BasisMatrix basis_matrix(const Vector& y, const BasisSpec& spec);

/// X^T F (F^T F)^{-1} F^T X / n over centered X and F. For slice indicators
/// the last indicator column is dropped since centered indicators sum to zero.
SymMatrix fit_cov(const Dataset& data, const BasisSpec& spec, bool allow_pseudo_inverse = false);

}  // namespace cssir
