#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "cdmafs/alignment.hpp"
#include "cdmafs/errors.hpp"

using namespace cdmafs;

namespace {

std::mt19937& rng() {
  static std::mt19937 gen(1234);
  return gen;
}

Matrix random_matrix(int rows, int cols) {
  std::normal_distribution<double> gauss;
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = gauss(rng());
  return m;
}

Matrix random_symmetric(int n) {
  const Matrix m = random_matrix(n, n);
  return 0.5 * (m + m.transpose());
}

Vector random_selection(int d) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Vector s(d);
  for (int p = 0; p < d; ++p) s(p) = uni(rng());
  return s;
}

// Naive reimplementation of the objective by explicit loops with a
// materialized centering matrix. Oracle only; never calls the library's
// kernel or centering code.
double objective_bruteforce(const Matrix& g, const Matrix& x, const Vector& s,
                            double sigma_sq, double lambda) {
  const Eigen::Index n = x.rows();
  const Matrix h =
      Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / double(n));
  const Matrix hgh = h * g * h;
  double data = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double d2 = 0.0;
      for (Eigen::Index p = 0; p < x.cols(); ++p) {
        const double diff = s(p) * (x(i, p) - x(j, p));
        d2 += diff * diff;
      }
      data += hgh(i, j) * std::exp(-d2 / sigma_sq);
    }
  return -data + lambda * s.sum();
}

Vector gradient_finite_difference(const AlignmentContext& ctx,
                                  const Vector& s, double h) {
  Vector fd(s.size());
  for (Eigen::Index p = 0; p < s.size(); ++p) {
    Vector plus = s, minus = s;
    plus(p) += h;
    minus(p) -= h;
    fd(p) = (objective(ctx, plus) - objective(ctx, minus)) / (2.0 * h);
  }
  return fd;
}

}  // namespace

TEST_CASE("rbf kernel") {
  Matrix x(3, 2);
  x << 1, 0, 0, 1, 1, 0;

  SUBCASE("all-zero selection gives the all-ones matrix") {
    const Matrix k = rbf_kernel(x, Vector::Zero(2), 1.0);
    CHECK((k - Matrix::Ones(3, 3)).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("analytic value at full selection") {
    const Matrix k = rbf_kernel(x, Vector::Ones(2), 1.0);
    CHECK(k(0, 1) == doctest::Approx(std::exp(-2.0)));
    CHECK(k(0, 2) == 1.0);  // duplicate rows
    CHECK(k.diagonal().isOnes());
    CHECK(k == k.transpose().eval());
  }

  SUBCASE("kernel is positive semidefinite") {
    for (int trial = 0; trial < 5; ++trial) {
      const Matrix pts = random_matrix(10, 4);
      const Matrix k = rbf_kernel(pts, random_selection(4), 1.5);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(k);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
    }
  }

  SUBCASE("invalid inputs") {
    CHECK_THROWS_AS(rbf_kernel(x, Vector::Ones(2), 0.0), ConfigError);
    CHECK_THROWS_AS(rbf_kernel(x, Vector::Ones(3), 1.0), ConfigError);
  }
}

TEST_CASE("centering") {
  SUBCASE("constant matrix maps to zero") {
    const Matrix c = Matrix::Constant(5, 5, 3.7);
    CHECK(center(c).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("idempotent") {
    const Matrix m = random_symmetric(6);
    const Matrix once = center(m);
    CHECK((center(once) - once).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("identity at n=2") {
    const Matrix out = center(Matrix::Identity(2, 2));
    Matrix expected(2, 2);
    expected << 0.5, -0.5, -0.5, 0.5;
    CHECK((out - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("rows and columns sum to zero") {
    const Matrix out = center(random_symmetric(8));
    for (int i = 0; i < 8; ++i) {
      CHECK(std::abs(out.row(i).sum()) <= 1e-8);
      CHECK(std::abs(out.col(i).sum()) <= 1e-8);
    }
  }
}

TEST_CASE("alignment scores") {
  Matrix k1(2, 2), k2(2, 2);
  k1 << 1, 0, 0, 1;
  k2 << 2, 1, 1, 2;
  CHECK(alignment_score(k1, k2, AlignmentVariant::Unnormalized) ==
        doctest::Approx(4.0));
  const Matrix k = random_symmetric(5);
  CHECK(alignment_score(k, k, AlignmentVariant::Normalized) ==
        doctest::Approx(1.0));
  CHECK(alignment_score(k, Matrix::Constant(5, 5, 2.0),
                        AlignmentVariant::Centered) ==
        doctest::Approx(0.0).epsilon(1e-9));
  CHECK_THROWS_AS(alignment_score(Matrix::Zero(3, 3), Matrix::Zero(3, 3),
                                  AlignmentVariant::Normalized),
                  ConfigError);
}

TEST_CASE("objective") {
  SUBCASE("all-ones G vanishes after centering") {
    AlignmentContext ctx{center(Matrix::Ones(4, 4)), random_matrix(4, 3), 1.0,
                         0.0};
    CHECK(std::abs(objective(ctx, random_selection(3))) <= 1e-9);
  }

  SUBCASE("s = 0 gives zero for any G") {
    AlignmentContext ctx{center(random_symmetric(5)), random_matrix(5, 4),
                         1.0, 0.0};
    CHECK(std::abs(objective(ctx, Vector::Zero(4))) <= 1e-9);
  }

  SUBCASE("matches brute-force evaluation") {
    const Matrix g = random_symmetric(8);
    const Matrix x = random_matrix(8, 3);
    const Vector s = random_selection(3);
    for (double lambda : {0.0, 0.3}) {
      AlignmentContext ctx{center(g), x, 1.2, lambda};
      CHECK(objective(ctx, s) ==
            doctest::Approx(objective_bruteforce(g, x, s, 1.2, lambda))
                .epsilon(1e-9));
    }
  }
}

TEST_CASE("gradient") {
  SUBCASE("s = 0 gives lambda in every coordinate") {
    AlignmentContext ctx{center(random_symmetric(6)), random_matrix(6, 5),
                         1.0, 0.25};
    const Vector grad = gradient(ctx, Vector::Zero(5));
    CHECK((grad.array() - 0.25).abs().maxCoeff() <= 1e-12);
  }

  SUBCASE("constant feature column contributes exactly lambda") {
    Matrix x = random_matrix(6, 3);
    x.col(1).setConstant(2.0);
    AlignmentContext ctx{center(random_symmetric(6)), x, 1.0, 0.5};
    const Vector grad = gradient(ctx, random_selection(3));
    CHECK(grad(1) == doctest::Approx(0.5));
  }

  SUBCASE("matches central finite differences") {
    AlignmentContext ctx{center(random_symmetric(10)), random_matrix(10, 6),
                         1.0, 0.1};
    const Vector s = random_selection(6);
    const Vector analytic = gradient(ctx, s);
    const Vector fd = gradient_finite_difference(ctx, s, 1e-5);
    for (int p = 0; p < 6; ++p)
      CHECK(std::abs(analytic(p) - fd(p)) / (1.0 + std::abs(analytic(p))) <
            1e-5);
  }
}

TEST_CASE("objective/gradient invariances") {
  const Matrix g = random_symmetric(7);
  const Matrix x = random_matrix(7, 4);
  const Vector s = random_selection(4);
  AlignmentContext ctx{center(g), x, 1.0, 0.2};

  SUBCASE("translation of G by a constant matrix changes nothing") {
    AlignmentContext shifted{center((g + Matrix::Constant(7, 7, 5.0)).eval()),
                             x, 1.0, 0.2};
    CHECK(std::abs(objective(ctx, s) - objective(shifted, s)) <= 1e-9);
    CHECK((gradient(ctx, s) - gradient(shifted, s)).cwiseAbs().maxCoeff() <=
          1e-9);
  }

  SUBCASE("permuting instances leaves objective and gradient unchanged") {
    std::vector<int> perm{3, 1, 6, 0, 5, 2, 4};
    Matrix xp(7, 4);
    Matrix gp(7, 7);
    for (int i = 0; i < 7; ++i) {
      xp.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
      for (int j = 0; j < 7; ++j)
        gp(i, j) = g(perm[static_cast<std::size_t>(i)],
                     perm[static_cast<std::size_t>(j)]);
    }
    AlignmentContext permuted{center(gp), xp, 1.0, 0.2};
    CHECK(objective(ctx, s) == doctest::Approx(objective(permuted, s)));
    CHECK((gradient(ctx, s) - gradient(permuted, s)).cwiseAbs().maxCoeff() <=
          1e-9);
  }

  SUBCASE("with zero data term the objective is the l1 penalty") {
    AlignmentContext penalty_only{Matrix::Zero(7, 7), x, 1.0, 0.7};
    CHECK(objective(penalty_only, s) == doctest::Approx(0.7 * s.sum()));
  }

  SUBCASE("evaluate agrees with objective and gradient") {
    const Evaluation eval = evaluate(ctx, s);
    CHECK(eval.value == objective(ctx, s));
    CHECK(eval.grad == gradient(ctx, s));
  }
}
