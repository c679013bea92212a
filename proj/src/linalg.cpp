#include "cssir/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cssir {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid input";
    case ErrorKind::kNumerical: return "numerical failure";
    case ErrorKind::kNotPsd: return "matrix not positive semidefinite";
    case ErrorKind::kNotPositiveDefinite: return "matrix not positive definite";
    case ErrorKind::kInsufficientData: return "insufficient data";
    case ErrorKind::kInvalidSlicing: return "invalid slicing";
    case ErrorKind::kCollinearBasis: return "collinear basis";
    case ErrorKind::kInvalidRank: return "invalid rank";
    case ErrorKind::kInvalidFold: return "invalid fold";
    case ErrorKind::kUndefinedRate: return "undefined rate";
    case ErrorKind::kUndefinedCorrelation: return "undefined correlation";
    case ErrorKind::kInvalidBasis: return "invalid basis";
    case ErrorKind::kDivergence: return "divergence";
    case ErrorKind::kInvalidParameter: return "invalid parameter";
    case ErrorKind::kAggregateInvalid: return "aggregate invalid";
    case ErrorKind::kIo: return "I/O error";
    case ErrorKind::kParse: return "parse error";
  }
  return "unknown error";
}

SymMatrix::SymMatrix(const Matrix& a) {
  if (a.rows() != a.cols()) {
    std::ostringstream os;
    os << "matrix is " << a.rows() << "x" << a.cols() << ", expected square";
    throw Error(ErrorKind::kInvalidInput, os.str());
  }
  if (a.rows() < 1) throw Error(ErrorKind::kInvalidInput, "matrix dimension must be at least 1");
  m_ = 0.5 * (a + a.transpose());
}

SymMatrix SymMatrix::identity(Index d) { return SymMatrix(Matrix::Identity(d, d)); }

SymMatrix SymMatrix::zero(Index d) { return SymMatrix(Matrix::Zero(d, d)); }

SymMatrix SymMatrix::diagonal(const Vector& diag) { return SymMatrix(Matrix(diag.asDiagonal())); }

Matrix EigenDecomposition::reconstruct() const {
  return vectors * values.asDiagonal() * vectors.transpose();
}

EigenDecomposition sym_eigen(const SymMatrix& a) {
  if (!a.all_finite()) throw Error(ErrorKind::kInvalidInput, "non-finite entries in eigen input");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigensolver did not converge (d=" << a.dim()
       << ", |A|_F=" << a.matrix().norm()
       << ", |A|_max=" << a.matrix().cwiseAbs().maxCoeff() << ")";
    throw Error(ErrorKind::kNumerical, os.str());
  }
  // Eigen returns ascending order.
  EigenDecomposition out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

SymMatrix sqrt_psd(const EigenDecomposition& eig) {
  const double lmax = eig.values(0);
  const double lmin = eig.values(eig.values.size() - 1);
  const double floor = -1e-6 * std::max(1.0, lmax);
  if (lmin < floor) {
    std::ostringstream os;
    os << "minimum eigenvalue " << lmin << " below tolerance " << floor;
    throw Error(ErrorKind::kNotPsd, os.str());
  }
  const Vector root = eig.values.cwiseMax(0.0).cwiseSqrt();
  return SymMatrix(eig.vectors * root.asDiagonal() * eig.vectors.transpose());
}

SymMatrix sqrt_psd(const SymMatrix& a) { return sqrt_psd(sym_eigen(a)); }

SymMatrix soft_threshold(const SymMatrix& a, double b) {
  if (!(b >= 0.0)) throw Error(ErrorKind::kInvalidInput, "soft-threshold level must be nonnegative");
  const Matrix out = a.matrix().unaryExpr([b](double v) {
    const double mag = std::abs(v) - b;
    return mag > 0.0 ? std::copysign(mag, v) : 0.0;
  });
  return SymMatrix(out);
}

MatrixNorms norms(const SymMatrix& a) {
  if (!a.all_finite()) throw Error(ErrorKind::kInvalidInput, "non-finite entries in norm input");
  const EigenDecomposition eig = sym_eigen(a);
  MatrixNorms out;
  out.frobenius = a.matrix().norm();
  out.spectral = eig.values.cwiseAbs().maxCoeff();
  out.nuclear = eig.values.cwiseAbs().sum();
  out.max = a.matrix().cwiseAbs().maxCoeff();
  out.l1 = a.matrix().cwiseAbs().sum();
  return out;
}

Matrix cholesky(const SymMatrix& a) {
  if (!a.all_finite()) throw Error(ErrorKind::kInvalidInput, "non-finite entries in Cholesky input");
  Eigen::LLT<Matrix> llt(a.matrix());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::kNotPositiveDefinite, "non-positive pivot in Cholesky factorization");
  }
  return llt.matrixL();
}

}  // namespace cssir
