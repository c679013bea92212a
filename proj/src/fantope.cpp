#include "cssir/fantope.hpp"

#include <lapacke.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <sstream>

namespace cssir {

namespace {

Matrix assemble(const Matrix& vectors, const Vector& weights) {
  Matrix h = Matrix::Zero(vectors.rows(), vectors.rows());
  const Matrix scaled = vectors * weights.cwiseSqrt().asDiagonal();
  h.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
  h.triangularView<Eigen::StrictlyUpper>() = h.transpose();
  return h;
}

Matrix clip_full(const Matrix& w, Index k) {
  const EigenDecomposition eig = sym_eigen(SymMatrix(w));
  const ClipSolution clip = solve_gamma(std::span<const double>(eig.values.data(), eig.values.size()), k);
  Index active = 0;
  while (active < w.rows() && clip.clipped_values[active] > 0.0) ++active;
  if (active == 0) return Matrix::Zero(w.rows(), w.rows());
  return assemble(eig.vectors.leftCols(active), Eigen::Map<const Vector>(clip.clipped_values.data(), active));
}

}  // namespace

double clipped_trace(std::span<const double> omega, double gamma) {
  double sum = 0.0;
  for (double w : omega) sum += std::min(1.0, std::max(w - gamma, 0.0));
  return sum;
}

ClipSolution solve_gamma(std::span<const double> omega, Index k) {
  if (k < 1) throw Error(ErrorKind::kInvalidInput, "trace bound K must be at least 1");
  const double target = static_cast<double>(k);

  ClipSolution out;
  if (clipped_trace(omega, 0.0) > target) {
    std::vector<double> breaks{0.0};
    for (double w : omega) {
      if (w > 0.0) breaks.push_back(w);
      if (w - 1.0 > 0.0) breaks.push_back(w - 1.0);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    // The map is > target at breaks.front() and 0 at breaks.back(); bisect
    // for the first breakpoint where it drops to <= target.
    std::size_t lo = 0;
    std::size_t hi = breaks.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (clipped_trace(omega, breaks[mid]) > target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double f_lo = clipped_trace(omega, breaks[lo]);
    const double f_hi = clipped_trace(omega, breaks[hi]);
    const double frac = (f_lo - target) / (f_lo - f_hi);
    out.gamma_star = std::min(breaks[hi], breaks[lo] + frac * (breaks[hi] - breaks[lo]));
  }

  out.clipped_values.reserve(omega.size());
  for (double w : omega) {
    const double c = std::min(1.0, std::max(w - out.gamma_star, 0.0));
    out.clipped_values.push_back(c);
    out.achieved_trace += c;
  }
  return out;
}

Matrix fantope_clip(const Matrix& w, Index k) {
  if (k < 1) throw Error(ErrorKind::kInvalidInput, "trace bound K must be at least 1");
  if (!w.allFinite()) throw Error(ErrorKind::kInvalidInput, "matrix has non-finite entries");
  const Index r = w.rows();
  // Small blocks gain nothing from the partial path, and the reference
  // dstemr mishandles an index range on 2x2 input.
  if (r < 8) return clip_full(w, k);

  // The clip depends on every eigenvalue but only needs eigenvectors for the
  // leading ones with positive weight, usually a handful. Reduce to
  // tridiagonal form once, take all eigenvalues from it, then compute just
  // the required eigenvectors and map them back.
  const Eigen::Tridiagonalization<Matrix> tri(w);
  const Vector diag = tri.diagonal();
  const Vector sub = tri.subDiagonal();

  Vector ascending = diag;
  Vector work = sub;
  if (LAPACKE_dsterf(static_cast<lapack_int>(r), ascending.data(), work.data()) != 0) return clip_full(w, k);
  const Vector omega = ascending.reverse();
  const ClipSolution clip = solve_gamma(std::span<const double>(omega.data(), r), k);

  // Values are sorted, so the clipped ones with positive weight form a prefix.
  Index active = 0;
  while (active < r && clip.clipped_values[active] > 0.0) ++active;
  if (active == 0) return Matrix::Zero(r, r);

  Vector d = diag;
  Vector e(r);
  e.head(r - 1) = sub;
  e(r - 1) = 0.0;
  Vector found_values(r);
  Matrix z(r, active);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(active));
  lapack_int found = 0;
  lapack_logical tryrac = 1;
  const lapack_int info = LAPACKE_dstemr(
      LAPACK_COL_MAJOR, 'V', 'I', static_cast<lapack_int>(r), d.data(), e.data(), 0.0, 0.0,
      static_cast<lapack_int>(r - active + 1), static_cast<lapack_int>(r), &found, found_values.data(), z.data(),
      static_cast<lapack_int>(r), static_cast<lapack_int>(active), support.data(), &tryrac);
  if (info != 0 || found != active) return clip_full(w, k);

  // z holds the leading eigenvectors in ascending order.
  Vector weights(active);
  for (Index j = 0; j < active; ++j) weights(j) = clip.clipped_values[static_cast<std::size_t>(active - 1 - j)];
  const Matrix vectors = tri.matrixQ() * z;
  return assemble(vectors, weights);
}

SymMatrix project_fantope(const SymMatrix& w, Index k) {
  if (k < 1 || k > w.dim()) {
    std::ostringstream os;
    os << "trace bound K=" << k << " outside [1, " << w.dim() << "]";
    throw Error(ErrorKind::kInvalidInput, os.str());
  }
  return SymMatrix(fantope_clip(w.matrix(), k));
}

}  // namespace cssir
