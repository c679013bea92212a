#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cssir/metrics.hpp"
#include "test_util.hpp"

using namespace cssir;
using cssir::testing::kind_of;
using cssir::testing::TestRng;

namespace {

double pearson(const Vector& a, const Vector& b) {
  const Vector ac = a.array() - a.mean();
  const Vector bc = b.array() - b.mean();
  return ac.dot(bc) / std::sqrt(ac.squaredNorm() * bc.squaredNorm());
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("support_rates examples") {
    const std::vector<Index> truth{0, 1, 2};
    const SupportEval same = support_rates(truth, truth, 150);
    CHECK(same.tpr == 1.0);
    CHECK(same.fpr == 0.0);
    const SupportEval none = support_rates(truth, {}, 150);
    CHECK(none.tpr == 0.0);
    CHECK(none.fpr == 0.0);
    const SupportEval mixed = support_rates(truth, {0, 1, 3}, 150);
    CHECK(mixed.tpr == doctest::Approx(2.0 / 3.0));
    CHECK(mixed.fpr == doctest::Approx(1.0 / 147.0));
    const SupportEval all = support_rates(truth, [] {
      std::vector<Index> v(150);
      std::iota(v.begin(), v.end(), Index{0});
      return v;
    }(), 150);
    CHECK(all.tpr == 1.0);
    CHECK(all.fpr == 1.0);
  }

  TEST_CASE("support_rates rejects undefined rates and bad indices") {
    CHECK(kind_of([] { support_rates({}, {0}, 5); }) == ErrorKind::kUndefinedRate);
    CHECK(kind_of([] { support_rates({0, 1, 2}, {0}, 3); }) == ErrorKind::kUndefinedRate);
    CHECK(kind_of([] { support_rates({0, 5}, {0}, 5); }) == ErrorKind::kInvalidInput);
    CHECK(kind_of([] { support_rates({0}, {-1}, 5); }) == ErrorKind::kInvalidInput);
  }

  TEST_CASE("support_rates counts by brute force and is permutation invariant") {
    TestRng rng(71);
    for (int trial = 0; trial < 300; ++trial) {
      const Index d = rng.integer(2, 30);
      std::vector<Index> truth;
      std::vector<Index> est;
      for (Index j = 0; j < d; ++j) {
        if (rng.uniform() < 0.3) truth.push_back(j);
        if (rng.uniform() < 0.3) est.push_back(j);
      }
      if (truth.empty() || static_cast<Index>(truth.size()) == d) continue;
      int tp = 0;
      int fp = 0;
      for (Index j = 0; j < d; ++j) {
        const bool in_t = std::find(truth.begin(), truth.end(), j) != truth.end();
        const bool in_e = std::find(est.begin(), est.end(), j) != est.end();
        tp += in_t && in_e;
        fp += !in_t && in_e;
      }
      const SupportEval r = support_rates(truth, est, d);
      CHECK(r.tpr == doctest::Approx(static_cast<double>(tp) / static_cast<double>(truth.size())));
      CHECK(r.fpr == doctest::Approx(static_cast<double>(fp) / static_cast<double>(d - static_cast<Index>(truth.size()))));

      std::vector<Index> perm(static_cast<std::size_t>(d));
      std::iota(perm.begin(), perm.end(), Index{0});
      std::shuffle(perm.begin(), perm.end(), std::mt19937_64(static_cast<std::uint64_t>(trial)));
      auto apply = [&perm](std::vector<Index> v) {
        for (Index& j : v) j = perm[static_cast<std::size_t>(j)];
        std::reverse(v.begin(), v.end());
        return v;
      };
      const SupportEval p = support_rates(apply(truth), apply(est), d);
      CHECK(p.tpr == r.tpr);
      CHECK(p.fpr == r.fpr);
    }
  }

  TEST_CASE("score_correlation examples") {
    TestRng rng(72);
    const Index n = 1000;
    const Index d = 6;
    const Matrix x = rng.normal_matrix(n, d);
    const Matrix b = rng.normal_matrix(d, 2);
    CHECK(score_correlation(x, b, b) == doctest::Approx(1.0));

    // An estimate whose scores are orthogonal to the true scores in sample.
    const Vector beta = rng.normal_vector(d);
    const Matrix xc = x.rowwise() - x.colwise().mean();
    const Matrix s = xc.transpose() * xc / static_cast<double>(n);
    Vector g = rng.normal_vector(d);
    g -= (beta.dot(s * g) / beta.dot(s * beta)) * beta;
    CHECK(score_correlation(x, beta, g) <= 0.05);

    // One perfect and one useless estimated direction for two true directions.
    Matrix truth(d, 2);
    truth.col(0) = beta;
    truth.col(1) = rng.normal_vector(d);
    Matrix est(d, 2);
    est.col(0) = beta;
    est.col(1) = g;
    const double second = std::max(std::abs(pearson(x * truth.col(1), x * beta)),
                                   std::abs(pearson(x * truth.col(1), x * g)));
    CHECK(score_correlation(x, truth, est) == doctest::Approx((1.0 + second) / 2.0).epsilon(1e-12));
  }

  TEST_CASE("score_correlation follows its definition and ignores direction scale") {
    TestRng rng(73);
    for (int trial = 0; trial < 100; ++trial) {
      const Index n = rng.integer(3, 60);
      const Index d = rng.integer(1, 8);
      const Index kt = rng.integer(1, 3);
      const Index ke = rng.integer(1, 3);
      const Matrix x = rng.normal_matrix(n, d);
      const Matrix t = rng.normal_matrix(d, kt);
      Matrix e = rng.normal_matrix(d, ke);
      double expected = 0.0;
      for (Index i = 0; i < kt; ++i) {
        double best = 0.0;
        for (Index j = 0; j < ke; ++j) best = std::max(best, std::abs(pearson(x * t.col(i), x * e.col(j))));
        expected += best / static_cast<double>(kt);
      }
      const double value = score_correlation(x, t, e);
      CHECK(value == doctest::Approx(expected).epsilon(1e-10));
      CHECK(value >= 0.0);
      CHECK(value <= 1.0);
      for (Index j = 0; j < ke; ++j) e.col(j) *= rng.uniform(-5.0, 5.0);
      CHECK(score_correlation(x, t, e) == doctest::Approx(value).epsilon(1e-10));
    }
  }

  TEST_CASE("score_correlation errors") {
    const Matrix x = Matrix::Identity(4, 3);
    CHECK(kind_of([] { score_correlation(Matrix::Ones(2, 3), Matrix::Ones(3, 1), Matrix::Ones(3, 1)); }) ==
          ErrorKind::kInsufficientData);
    Matrix constant = Matrix::Zero(5, 2);
    constant.col(0).setOnes();
    Matrix e1 = Matrix::Zero(2, 1);
    e1(0) = 1.0;
    Matrix e2 = Matrix::Zero(2, 1);
    e2(1) = 1.0;
    CHECK(kind_of([&] { score_correlation(constant, e1, e1); }) == ErrorKind::kUndefinedCorrelation);
    CHECK(kind_of([&] { score_correlation(constant, e2, e2); }) == ErrorKind::kUndefinedCorrelation);
    CHECK(kind_of([&] { score_correlation(x, Matrix::Ones(2, 1), Matrix::Ones(3, 1)); }) == ErrorKind::kInvalidInput);
  }

  TEST_CASE("subspace_distance examples") {
    TestRng rng(74);
    const Matrix u = rng.orthonormal(7, 3);
    const Matrix rot = rng.orthonormal(3, 3);
    CHECK(subspace_distance(u, u * rot) <= 1e-10);
    CHECK(subspace_distance(Matrix::Identity(2, 1), Matrix::Identity(2, 2).col(1)) == doctest::Approx(std::sqrt(2.0)));
    for (int trial = 0; trial < 50; ++trial) {
      const Matrix a = rng.orthonormal(6, 2);
      const Matrix b = rng.orthonormal(6, 2);
      const double identity = std::sqrt(std::max(0.0, 4.0 - 2.0 * (a.transpose() * b).squaredNorm()));
      CHECK(subspace_distance(a, b) == doctest::Approx(identity).epsilon(1e-10));
    }
  }

  TEST_CASE("subspace_distance is a pseudometric on spans") {
    TestRng rng(75);
    for (int trial = 0; trial < 200; ++trial) {
      const Index d = rng.integer(2, 8);
      const Index k = rng.integer(1, static_cast<int>(d));
      const Matrix a = rng.orthonormal(d, k);
      const Matrix b = rng.orthonormal(d, k);
      const Matrix c = rng.orthonormal(d, k);
      const double ab = subspace_distance(a, b);
      CHECK(ab == subspace_distance(b, a));
      CHECK(ab <= subspace_distance(a, c) + subspace_distance(c, b) + 1e-12);
      CHECK(subspace_distance(a, a * rng.orthonormal(k, k)) <= 1e-8);
      if (k < d) CHECK(ab > 1e-8);
    }
  }

  TEST_CASE("subspace_distance rejects non-orthonormal or mismatched bases") {
    Matrix skew = Matrix::Identity(3, 1);
    skew(1, 0) = 0.01;
    CHECK(kind_of([&] { subspace_distance(skew, Matrix::Identity(3, 1)); }) == ErrorKind::kInvalidBasis);
    CHECK(kind_of([] { subspace_distance(Matrix::Identity(3, 1), Matrix::Identity(3, 2)); }) == ErrorKind::kInvalidInput);
    Matrix tiny = Matrix::Identity(3, 1);
    tiny(1, 0) = 1e-9;
    CHECK_NOTHROW(subspace_distance(tiny, Matrix::Identity(3, 1)));
  }

  TEST_CASE("orthonormal_basis spans the input") {
    TestRng rng(76);
    for (int trial = 0; trial < 50; ++trial) {
      const Index d = rng.integer(1, 10);
      const Index k = rng.integer(1, static_cast<int>(d));
      const Matrix a = rng.normal_matrix(d, k);
      const Matrix q = orthonormal_basis(a);
      CHECK((q.transpose() * q - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((q * (q.transpose() * a) - a).norm() <= 1e-10 * a.norm());
    }
    Matrix rank1(4, 2);
    rank1.col(0) = Vector::Ones(4);
    rank1.col(1) = 2.0 * Vector::Ones(4);
    CHECK(kind_of([&] { orthonormal_basis(rank1); }) == ErrorKind::kInvalidBasis);
  }
}
