#include "cssir/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace cssir {

namespace {

std::set<Index> checked_set(const std::vector<Index>& idx, Index d, const char* what) {
  std::set<Index> out;
  for (Index j : idx) {
    if (j < 0 || j >= d) {
      std::ostringstream os;
      os << what << " index " << j << " outside [0, " << d << ")";
      throw Error(ErrorKind::kInvalidInput, os.str());
    }
    out.insert(j);
  }
  return out;
}

void check_orthonormal(const Matrix& a, const char* name) {
  const double dev = (a.transpose() * a - Matrix::Identity(a.cols(), a.cols())).cwiseAbs().maxCoeff();
  if (!(dev <= 1e-6)) {
    std::ostringstream os;
    os << name << " is not column-orthonormal (Gram deviation " << dev << ")";
    throw Error(ErrorKind::kInvalidBasis, os.str());
  }
}

}  // namespace

SupportEval support_rates(const std::vector<Index>& true_support, const std::vector<Index>& est_support, Index d) {
  const auto truth = checked_set(true_support, d, "true support");
  const auto est = checked_set(est_support, d, "estimated support");
  const Index positives = static_cast<Index>(truth.size());
  if (positives == 0 || positives == d) {
    throw Error(ErrorKind::kUndefinedRate, "true support must be non-empty and not the full index set");
  }
  Index hits = 0;
  for (Index j : est) hits += truth.count(j) ? 1 : 0;
  const Index false_hits = static_cast<Index>(est.size()) - hits;
  return {static_cast<double>(hits) / static_cast<double>(positives),
          static_cast<double>(false_hits) / static_cast<double>(d - positives)};
}

double score_correlation(const Matrix& x, const Matrix& true_dirs, const Matrix& est_dirs) {
  if (x.rows() < 3) throw Error(ErrorKind::kInsufficientData, "score correlation needs n >= 3");
  if (true_dirs.rows() != x.cols() || est_dirs.rows() != x.cols()) {
    throw Error(ErrorKind::kInvalidInput, "direction matrices must have d rows");
  }
  if (true_dirs.cols() < 1 || est_dirs.cols() < 1) throw Error(ErrorKind::kInvalidInput, "empty direction matrix");

  auto centered_scores = [&x](const Matrix& dirs) {
    Matrix s = x * dirs;
    s.rowwise() -= s.colwise().mean();
    for (Index k = 0; k < s.cols(); ++k) {
      const double norm = s.col(k).norm();
      if (!(norm > 0.0)) throw Error(ErrorKind::kUndefinedCorrelation, "direction has zero-variance scores");
      s.col(k) /= norm;
    }
    return s;
  };
  const Matrix a = centered_scores(true_dirs);
  const Matrix b = centered_scores(est_dirs);
  const Matrix corr = (a.transpose() * b).cwiseAbs();

  double total = 0.0;
  for (Index k = 0; k < corr.rows(); ++k) total += std::min(1.0, corr.row(k).maxCoeff());
  return total / static_cast<double>(corr.rows());
}

double subspace_distance(const Matrix& u, const Matrix& w) {
  if (u.rows() != w.rows() || u.cols() != w.cols()) {
    throw Error(ErrorKind::kInvalidInput, "subspace bases must have the same shape");
  }
  check_orthonormal(u, "U");
  check_orthonormal(w, "W");
  return (u * u.transpose() - w * w.transpose()).norm();
}

Matrix orthonormal_basis(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  const Matrix r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
  if ((r.diagonal().cwiseAbs().array() <= 1e-12 * std::max(1.0, a.norm())).any()) {
    throw Error(ErrorKind::kInvalidBasis, "matrix is not of full column rank");
  }
  return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

}  // namespace cssir
