#include <doctest.h>

#include <cmath>
#include <random>

#include "cdmafs/affinity.hpp"
#include "cdmafs/errors.hpp"

using namespace cdmafs;

namespace {

Matrix random_points(int n, int d, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;
  Matrix x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = gauss(rng);
  return x;
}

// brute-force reverse-kNN membership for one pair
bool is_knn_of(const Matrix& x, Eigen::Index i, Eigen::Index j, int k) {
  std::vector<std::pair<double, Eigen::Index>> dist;
  for (Eigen::Index a = 0; a < x.rows(); ++a) {
    if (a == j) continue;
    dist.push_back({(x.row(a) - x.row(j)).squaredNorm(), a});
  }
  std::stable_sort(dist.begin(), dist.end());
  for (int r = 0; r < k; ++r)
    if (dist[static_cast<std::size_t>(r)].second == i) return true;
  return false;
}

}  // namespace

TEST_CASE("gaussian weighting") {
  Matrix x(3, 2);
  x << 1, 0, 0, 1, 1, 0;
  AffinityConfig cfg;
  cfg.weighting = Weighting::Gaussian;
  cfg.sigma_sq = 1.0;
  const Matrix w = build_similarity(x, cfg);
  CHECK(w(0, 1) == doctest::Approx(std::exp(-2.0)));
  CHECK(w(0, 2) == doctest::Approx(1.0));  // identical points
  CHECK(w(0, 0) == 0.0);
  CHECK(w == w.transpose().eval());
  CHECK((w.array() <= 1.0).all());

  cfg.sigma_sq = -1.0;
  CHECK_THROWS_AS(build_similarity(x, cfg), ConfigError);
}

TEST_CASE("dot-product weighting clamps negatives") {
  Matrix x(2, 2);
  x << 1, 0, -1, 0;
  AffinityConfig cfg;
  cfg.weighting = Weighting::DotProduct;
  const Matrix w = build_similarity(x, cfg);
  CHECK(w(0, 1) == 0.0);
  CHECK(w(1, 0) == 0.0);
}

TEST_CASE("zero-one-knn weighting") {
  SUBCASE("collinear k=1") {
    Matrix x(3, 1);
    x << 0, 1, 10;
    AffinityConfig cfg;
    cfg.weighting = Weighting::ZeroOneKnn;
    cfg.k = 1;
    const Matrix w = build_similarity(x, cfg);
    for (Eigen::Index i = 0; i < 3; ++i)
      for (Eigen::Index j = 0; j < 3; ++j)
        CHECK(w(i, j) == (i != j && is_knn_of(x, i, j, 1) ? 1.0 : 0.0));
  }

  SUBCASE("matches brute-force membership on random points") {
    const Matrix x = random_points(12, 3, 99);
    AffinityConfig cfg;
    cfg.weighting = Weighting::ZeroOneKnn;
    cfg.k = 3;
    const Matrix w = build_similarity(x, cfg);
    for (Eigen::Index i = 0; i < 12; ++i)
      for (Eigen::Index j = 0; j < 12; ++j)
        CHECK(w(i, j) == (i != j && is_knn_of(x, i, j, 3) ? 1.0 : 0.0));
    // exactly k ones per column
    for (Eigen::Index j = 0; j < 12; ++j) CHECK(w.col(j).sum() == 3.0);
  }

  SUBCASE("scale invariance") {
    const Matrix x = random_points(10, 4, 5);
    AffinityConfig cfg;
    cfg.weighting = Weighting::ZeroOneKnn;
    cfg.k = 4;
    CHECK(build_similarity(x, cfg) == build_similarity((2.5 * x).eval(), cfg));
  }

  SUBCASE("k out of range") {
    const Matrix x = random_points(5, 2, 1);
    AffinityConfig cfg;
    cfg.weighting = Weighting::ZeroOneKnn;
    cfg.k = 5;
    CHECK_THROWS_AS(build_similarity(x, cfg), ConfigError);
  }
}

TEST_CASE("row_normalize") {
  SUBCASE("single off-diagonal entry") {
    Matrix w(2, 2);
    w << 0, 2, 2, 0;
    const Matrix p = row_normalize(w).p;
    Matrix expected(2, 2);
    expected << 0, 1, 1, 0;
    CHECK(p == expected);
  }

  SUBCASE("symmetric 3x3") {
    Matrix w(3, 3);
    w << 0, 1, 1, 1, 0, 1, 1, 1, 0;
    const Matrix p = row_normalize(w).p;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(p(i, j) == (i == j ? 0.0 : 0.5));
  }

  SUBCASE("zero row falls back to uniform off-diagonal") {
    Matrix w = Matrix::Zero(3, 3);
    w(1, 0) = 1;
    w(2, 0) = 1;
    const auto result = row_normalize(w);
    CHECK(result.zero_rows == std::vector<int>{0});
    CHECK(result.p(0, 0) == 0.0);
    CHECK(result.p(0, 1) == 0.5);
    CHECK(result.p(0, 2) == 0.5);
  }

  SUBCASE("row sums are 1 for random similarities") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Matrix w(20, 20);
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) w(i, j) = uni(rng);
    w.diagonal().setZero();
    const Matrix p = row_normalize(w).p;
    for (int i = 0; i < 20; ++i)
      CHECK(std::abs(p.row(i).sum() - 1.0) <= 1e-10);
    CHECK((p.array() >= 0.0).all());
    CHECK((p.array() <= 1.0).all());
    CHECK(p.diagonal().cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("rejects negative similarities") {
    Matrix w(2, 2);
    w << 0, -1, 1, 0;
    CHECK_THROWS_AS(row_normalize(w), DataError);
  }
}
