#include <doctest.h>

#include <array>
#include <cmath>

#include "cssir/linalg.hpp"
#include "test_util.hpp"

using namespace cssir;
using cssir::testing::kind_of;
using cssir::testing::TestRng;

namespace {

Matrix ar1(Index d) {
  Matrix s(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) s(i, j) = std::pow(0.5, std::abs(static_cast<double>(i - j)));
  return s;
}

}  // namespace

TEST_SUITE("linalg") {
  TEST_CASE("SymMatrix symmetrizes its input exactly") {
    TestRng rng(1);
    const SymMatrix s(rng.normal_matrix(6, 6));
    CHECK(s.matrix() == s.matrix().transpose());
    CHECK(kind_of([] { SymMatrix(Matrix(2, 3)); }) == ErrorKind::kInvalidInput);
    CHECK(kind_of([] { SymMatrix(Matrix(0, 0)); }) == ErrorKind::kInvalidInput);
  }

  TEST_CASE("sym_eigen of the identity and of a diagonal matrix") {
    const EigenDecomposition id = sym_eigen(SymMatrix::identity(3));
    CHECK(id.values.isApproxToConstant(1.0));
    CHECK((id.vectors.transpose() * id.vectors - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-12);

    Vector diag(3);
    diag << 1.0, 3.0, -2.0;
    const EigenDecomposition e = sym_eigen(SymMatrix::diagonal(diag));
    CHECK(e.values(0) == doctest::Approx(3.0));
    CHECK(e.values(1) == doctest::Approx(1.0));
    CHECK(e.values(2) == doctest::Approx(-2.0));
    CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(0, 1)) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(2, 2)) == doctest::Approx(1.0));
  }

  TEST_CASE("sym_eigen reconstructs random symmetric matrices") {
    TestRng rng(2);
    for (Index d : {1, 2, 5, 17, 60, 150, 300}) {
      const Matrix a = rng.symmetric(d);
      const EigenDecomposition e = sym_eigen(SymMatrix(a));
      // Direct multiplication, independent of reconstruct().
      Matrix back = Matrix::Zero(d, d);
      for (Index j = 0; j < d; ++j) back += e.values(j) * e.vectors.col(j) * e.vectors.col(j).transpose();
      CHECK((back - a).norm() <= 1e-8 * std::max(1.0, a.norm()));
      CHECK((e.reconstruct() - a).norm() <= 1e-8 * std::max(1.0, a.norm()));
      CHECK((e.vectors.transpose() * e.vectors - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-8);
      for (Index j = 1; j < d; ++j) CHECK(e.values(j - 1) >= e.values(j));
    }
  }

  TEST_CASE("sym_eigen rejects non-finite entries") {
    Matrix a = Matrix::Identity(3, 3);
    a(1, 1) = std::nan("");
    CHECK(kind_of([&] { sym_eigen(SymMatrix(a)); }) == ErrorKind::kInvalidInput);
  }

  TEST_CASE("sqrt_psd examples") {
    CHECK((sqrt_psd(SymMatrix::identity(4)).matrix() - Matrix::Identity(4, 4)).norm() <= 1e-14);
    const SymMatrix r = sqrt_psd(SymMatrix::diagonal(Vector::Map(std::array{4.0, 9.0}.data(), 2)));
    CHECK(r(0, 0) == doctest::Approx(2.0));
    CHECK(r(1, 1) == doctest::Approx(3.0));
    CHECK(std::abs(r(0, 1)) <= 1e-14);

    const Matrix sigma = ar1(4);
    const Matrix s = sqrt_psd(SymMatrix(sigma)).matrix();
    CHECK((s * s - sigma).norm() <= 1e-8);
  }

  TEST_CASE("sqrt_psd clamps rounding noise and rejects indefinite input") {
    Vector diag(3);
    diag << 2.0, 1.0, -1e-9;
    const SymMatrix r = sqrt_psd(SymMatrix::diagonal(diag));
    CHECK(r(2, 2) == 0.0);
    diag(2) = -1e-3;
    CHECK(kind_of([&] { sqrt_psd(SymMatrix::diagonal(diag)); }) == ErrorKind::kNotPsd);
  }

  TEST_CASE("sqrt_psd squares back for random PSD matrices") {
    TestRng rng(3);
    for (Index d : {1, 3, 10, 40}) {
      for (Index rank : {d, std::max<Index>(1, d / 2)}) {
        const Matrix g = rng.normal_matrix(d, rank);
        const Matrix a = g * g.transpose();
        const Matrix s = sqrt_psd(SymMatrix(a)).matrix();
        CHECK((s * s - a).norm() <= 1e-6 * a.norm());
        CHECK(sym_eigen(SymMatrix(s)).values.minCoeff() >= -1e-10);
      }
    }
  }

  TEST_CASE("soft_threshold examples") {
    Matrix a(2, 2);
    a << 0.7, -0.1, -0.1, 0.7;
    const SymMatrix s = soft_threshold(SymMatrix(a), 0.2);
    CHECK(s(0, 0) == doctest::Approx(0.5));
    CHECK(s(0, 1) == 0.0);
    CHECK(s(1, 1) == doctest::Approx(0.5));

    TestRng rng(4);
    const SymMatrix b(rng.symmetric(5));
    CHECK(soft_threshold(b, 0.0).matrix() == b.matrix());
    CHECK(kind_of([&] { soft_threshold(b, -0.1); }) == ErrorKind::kInvalidInput);
  }

  TEST_CASE("soft_threshold is non-expansive and keeps symmetry") {
    TestRng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      const Index d = rng.integer(1, 8);
      const SymMatrix a(rng.symmetric(d));
      const SymMatrix b(rng.symmetric(d));
      const double t = rng.uniform(0.0, 2.0);
      const Matrix sa = soft_threshold(a, t).matrix();
      const Matrix sb = soft_threshold(b, t).matrix();
      CHECK((sa - sb).norm() <= (a.matrix() - b.matrix()).norm() + 1e-15);
      CHECK(sa == sa.transpose());
    }
  }

  TEST_CASE("norms examples") {
    const MatrixNorms id = norms(SymMatrix::identity(3));
    CHECK(id.frobenius == doctest::Approx(std::sqrt(3.0)));
    CHECK(id.spectral == doctest::Approx(1.0));
    CHECK(id.nuclear == doctest::Approx(3.0));
    CHECK(id.max == 1.0);
    CHECK(id.l1 == 3.0);

    const MatrixNorms zero = norms(SymMatrix::zero(4));
    CHECK(zero.frobenius == 0.0);
    CHECK(zero.spectral == 0.0);
    CHECK(zero.nuclear == 0.0);
    CHECK(zero.max == 0.0);
    CHECK(zero.l1 == 0.0);

    Vector diag(2);
    diag << 2.0, -1.0;
    const MatrixNorms n = norms(SymMatrix::diagonal(diag));
    CHECK(n.spectral == doctest::Approx(2.0));
    CHECK(n.nuclear == doctest::Approx(3.0));
    CHECK(n.frobenius == doctest::Approx(std::sqrt(5.0)));
  }

  TEST_CASE("nuclear norm equals the trace for PSD input") {
    TestRng rng(6);
    for (Index d : {1, 4, 12, 30}) {
      const SymMatrix a(rng.psd(d));
      CHECK(norms(a).nuclear == doctest::Approx(a.trace()).epsilon(1e-12));
    }
  }

  TEST_CASE("cholesky examples") {
    CHECK((cholesky(SymMatrix::identity(3)) - Matrix::Identity(3, 3)).norm() == 0.0);

    Matrix a(2, 2);
    a << 4.0, 2.0, 2.0, 5.0;
    const Matrix l = cholesky(SymMatrix(a));
    Matrix expected(2, 2);
    expected << 2.0, 0.0, 1.0, 2.0;
    CHECK((l - expected).norm() <= 1e-14);
    CHECK((l * l.transpose() - a).norm() <= 1e-10 * a.norm());

    const Matrix sigma = ar1(3);
    const Matrix ls = cholesky(SymMatrix(sigma));
    CHECK((ls * ls.transpose() - sigma).norm() <= 1e-10 * sigma.norm());
    CHECK(ls.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().norm() == 0.0);
  }

  TEST_CASE("cholesky rejects non positive definite input") {
    Vector diag(2);
    diag << 1.0, 0.0;
    CHECK(kind_of([&] { cholesky(SymMatrix::diagonal(diag)); }) == ErrorKind::kNotPositiveDefinite);
    Matrix a(2, 2);
    a << 1.0, 2.0, 2.0, 1.0;
    CHECK(kind_of([&] { cholesky(SymMatrix(a)); }) == ErrorKind::kNotPositiveDefinite);
  }
}
