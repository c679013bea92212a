#include "cssir/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace cssir {

namespace {

Matrix centered(const Matrix& x) { return x.rowwise() - x.colwise().mean(); }

// Sum of outer products of the centered rows, divided by the row count.
Matrix within_cov(const Matrix& rows) {
  const Matrix c = centered(rows);
  Matrix out = Matrix::Zero(rows.cols(), rows.cols());
  out.selfadjointView<Eigen::Lower>().rankUpdate(c.transpose());
  out.triangularView<Eigen::StrictlyUpper>() = out.transpose();
  return out / static_cast<double>(rows.rows());
}

Matrix gather_rows(const Matrix& x, const std::vector<Index>& order, Index begin, Index end) {
  Matrix out(end - begin, x.cols());
  for (Index r = begin; r < end; ++r) out.row(r - begin) = x.row(order[r]);
  return out;
}

}  // namespace

Dataset::Dataset(Vector y, Matrix x) : y_(std::move(y)), x_(std::move(x)) {
  if (y_.size() != x_.rows()) {
    std::ostringstream os;
    os << "response has " << y_.size() << " entries but design has " << x_.rows() << " rows";
    throw Error(ErrorKind::kInvalidInput, os.str());
  }
  if (y_.size() < 2) throw Error(ErrorKind::kInsufficientData, "a dataset needs at least 2 observations");
  if (x_.cols() < 1) throw Error(ErrorKind::kInvalidInput, "a dataset needs at least 1 covariate");
  if (!y_.allFinite() || !x_.allFinite()) throw Error(ErrorKind::kInvalidInput, "dataset contains non-finite values");
}

Dataset Dataset::subset(const std::vector<Index>& rows) const {
  Vector y(static_cast<Index>(rows.size()));
  Matrix x(static_cast<Index>(rows.size()), d());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    y(static_cast<Index>(i)) = y_(rows[i]);
    x.row(static_cast<Index>(i)) = x_.row(rows[i]);
  }
  return Dataset(std::move(y), std::move(x));
}

std::vector<Index> order_by_response(const Vector& y) {
  std::vector<Index> idx(static_cast<std::size_t>(y.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&y](Index a, Index b) { return y(a) < y(b); });
  return idx;
}

std::vector<Index> slice_offsets(Index n, Index slices) {
  if (slices < 1 || slices > n) {
    std::ostringstream os;
    os << "cannot split " << n << " observations into " << slices << " slices";
    throw Error(ErrorKind::kInvalidSlicing, os.str());
  }
  std::vector<Index> offsets{0};
  const Index base = n / slices;
  const Index extra = n % slices;
  for (Index h = 0; h < slices; ++h) offsets.push_back(offsets.back() + base + (h < extra ? 1 : 0));
  return offsets;
}

std::string ConditionalMethod::describe() const {
  if (kind == Kind::kDifference) return "diff";
  return "slice:" + std::to_string(slices);
}

std::string BasisSpec::describe() const {
  return (kind == Kind::kPolynomial ? "poly:" : "slice:") + std::to_string(order);
}

SymMatrix sample_cov(const Matrix& x) {
  if (x.rows() < 2) throw Error(ErrorKind::kInsufficientData, "sample covariance needs n >= 2");
  return SymMatrix(within_cov(x));
}

SymMatrix diff_estimator_t(const Dataset& data) {
  const auto order = order_by_response(data.y());
  const Index pairs = data.n() / 2;
  Matrix diffs(pairs, data.d());
  for (Index i = 0; i < pairs; ++i) {
    diffs.row(i) = data.x().row(order[2 * i + 1]) - data.x().row(order[2 * i]);
  }
  Matrix t = Matrix::Zero(data.d(), data.d());
  t.selfadjointView<Eigen::Lower>().rankUpdate(diffs.transpose());
  t.triangularView<Eigen::StrictlyUpper>() = t.transpose();
  return SymMatrix(t / static_cast<double>(data.n()));
}

SymMatrix slice_estimator_t(const Dataset& data, Index slices) {
  const auto offsets = slice_offsets(data.n(), slices);
  const auto order = order_by_response(data.y());
  Matrix t = Matrix::Zero(data.d(), data.d());
  for (Index h = 0; h < slices; ++h) {
    t += within_cov(gather_rows(data.x(), order, offsets[h], offsets[h + 1]));
  }
  return SymMatrix(t / static_cast<double>(slices));
}

SymMatrix conditional_cov(const Dataset& data, const ConditionalMethod& method) {
  const SymMatrix sigma = sample_cov(data.x());
  const SymMatrix t = method.kind == ConditionalMethod::Kind::kDifference
                          ? diff_estimator_t(data)
                          : slice_estimator_t(data, method.slices);
  return SymMatrix(sigma.matrix() - t.matrix());
}

BasisMatrix basis_matrix(const Vector& y, const BasisSpec& spec) {
  const Index n = y.size();
  if (spec.order < 1) throw Error(ErrorKind::kInvalidParameter, "basis order must be at least 1");
  BasisMatrix out;
  if (spec.kind == BasisSpec::Kind::kPolynomial) {
    out.f.resize(n, spec.order);
    for (Index i = 0; i < n; ++i) {
      double p = 1.0;
      for (Index k = 0; k < spec.order; ++k) {
        p *= y(i);
        out.f(i, k) = p;
      }
    }
  } else {
    if (spec.order < 2 || spec.order > n) {
      std::ostringstream os;
      os << "slice-indicator basis needs 2 <= r <= n, got r=" << spec.order << " n=" << n;
      throw Error(ErrorKind::kInvalidSlicing, os.str());
    }
    const auto offsets = slice_offsets(n, spec.order);
    const auto order = order_by_response(y);
    out.f = Matrix::Zero(n, spec.order);
    for (Index h = 0; h < spec.order; ++h) {
      for (Index r = offsets[h]; r < offsets[h + 1]; ++r) out.f(order[r], h) = 1.0;
    }
  }
  out.f = centered(out.f);

  if (n > 0 && (y.array() == y(0)).all()) {
    out.rank_deficient = true;
    out.warnings.emplace_back("all responses are equal; the basis carries no information about y");
  } else if ((out.f.colwise().squaredNorm().array() == 0.0).any()) {
    out.rank_deficient = true;
    out.warnings.emplace_back("basis has a constant column");
  }
  return out;
}

SymMatrix fit_cov(const Dataset& data, const BasisSpec& spec, bool allow_pseudo_inverse) {
  BasisMatrix basis = basis_matrix(data.y(), spec);
  Matrix f = std::move(basis.f);
  if (spec.kind == BasisSpec::Kind::kSliceIndicator) f.conservativeResize(Eigen::NoChange, f.cols() - 1);
  if (data.n() <= f.cols()) {
    throw Error(ErrorKind::kInsufficientData, "fitted covariance needs n greater than the basis size");
  }

  const Matrix xc = centered(data.x());
  const Matrix ftf = f.transpose() * f;
  const Matrix ftx = f.transpose() * xc;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(ftf);
  const Vector ev = eig.eigenvalues();
  const double top = ev.maxCoeff();
  const double bottom = ev.minCoeff();
  const bool singular = !(top > 0.0) || bottom <= top * 1e-12;

  Matrix inv;
  if (!singular) {
    inv = eig.eigenvectors() * ev.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  } else if (allow_pseudo_inverse) {
    Vector pinv = Vector::Zero(ev.size());
    for (Index k = 0; k < ev.size(); ++k) {
      if (top > 0.0 && ev(k) > top * 1e-12) pinv(k) = 1.0 / ev(k);
    }
    inv = eig.eigenvectors() * pinv.asDiagonal() * eig.eigenvectors().transpose();
  } else {
    std::ostringstream os;
    os << "F^T F is singular or ill-conditioned (eigenvalues in [" << bottom << ", " << top << "])";
    throw Error(ErrorKind::kCollinearBasis, os.str());
  }
  return SymMatrix(ftx.transpose() * inv * ftx / static_cast<double>(data.n()));
}

}  // namespace cssir
