#include <doctest.h>

#include <cmath>
#include <random>

#include "cdmafs/errors.hpp"
#include "cdmafs/solver.hpp"

using namespace cdmafs;

namespace {

std::mt19937& rng() {
  static std::mt19937 gen(777);
  return gen;
}

Matrix random_matrix(int rows, int cols) {
  std::normal_distribution<double> gauss;
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = gauss(rng());
  return m;
}

AlignmentContext separable_context(int n, int d, double lambda,
                                   unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> gauss;
  Matrix x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = gauss(gen);
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = gauss(gen);
  g = (0.5 * (g + g.transpose())).eval();
  return AlignmentContext{center(g), x, 1.0, lambda};
}

}  // namespace

TEST_CASE("project_box") {
  Vector v(3);
  v << -0.5, 0.3, 1.7;
  Vector expected(3);
  expected << 0.0, 0.3, 1.0;
  CHECK(project_box(v) == expected);

  Vector feasible(4);
  feasible << 0.0, 0.25, 0.75, 1.0;
  CHECK(project_box(feasible) == feasible);

  Vector high = Vector::Constant(2, 2.0);
  CHECK(project_box(high) == Vector::Ones(2));

  Vector bad(2);
  bad << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(project_box(bad), DataError);
}

TEST_CASE("spg_solve on explicit quadratics") {
  SolverConfig cfg;
  cfg.spg_max_iters = 100;

  SUBCASE("interior minimum at 0.5") {
    // q(s) = |s - 0.5|^2 around start s0
    const Vector s0 = Vector::Constant(5, 0.9);
    const Vector g = 2.0 * (s0.array() - 0.5).matrix();
    const auto hess = [](const Vector& v) { return (2.0 * v).eval(); };
    const Vector sol = spg_solve(s0, g, hess, cfg);
    CHECK((sol.array() - 0.5).abs().maxCoeff() <= 1e-6);
  }

  SUBCASE("exterior minimum clamps to the corner") {
    const Vector s0 = Vector::Constant(4, 0.2);
    const Vector g = 2.0 * (s0.array() - 2.0).matrix();
    const auto hess = [](const Vector& v) { return (2.0 * v).eval(); };
    const Vector sol = spg_solve(s0, g, hess, cfg);
    CHECK((sol - Vector::Ones(4)).cwiseAbs().maxCoeff() <= 1e-9);
  }

  SUBCASE("matches the coordinatewise closed form on separable quadratics") {
    std::uniform_real_distribution<double> uni(0.5, 3.0);
    std::uniform_real_distribution<double> pos(-1.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
      Vector diag(5), target(5), s0(5);
      for (int p = 0; p < 5; ++p) {
        diag(p) = uni(rng());
        target(p) = pos(rng());
        s0(p) = std::uniform_real_distribution<double>(0.0, 1.0)(rng());
      }
      // q(s) = sum_p diag_p (s_p - target_p)^2
      const Vector g =
          2.0 * diag.cwiseProduct(s0 - target);
      const auto hess = [&](const Vector& v) {
        return (2.0 * diag.cwiseProduct(v)).eval();
      };
      const Vector sol = spg_solve(s0, g, hess, cfg);
      const Vector closed = target.cwiseMax(0.0).cwiseMin(1.0);
      CHECK((sol - closed).cwiseAbs().maxCoeff() <= 1e-6);
    }
  }

  SUBCASE("infeasible start is rejected") {
    const Vector s0 = Vector::Constant(3, 1.5);
    CHECK_THROWS_AS(
        spg_solve(s0, Vector::Zero(3),
                  [](const Vector& v) { return v; }, cfg),
        ConfigError);
  }
}

TEST_CASE("compact L-BFGS matches the dense recursion") {
  const int dim = 7;
  detail::LbfgsHessian compact(5);
  Matrix dense;
  double gamma = 1.0;
  std::vector<std::pair<Vector, Vector>> pairs;
  for (int i = 0; i < 4; ++i) {
    const Vector u = random_matrix(dim, 1);
    Vector y = random_matrix(dim, 1);
    if (y.dot(u) <= 1e-10) y = u;  // force acceptable curvature
    REQUIRE(compact.push(u, y));
    pairs.push_back({u, y});
    gamma = y.dot(y) / y.dot(u);
  }
  // dense BFGS updates from B0 = gamma * I, same pair order
  dense = gamma * Matrix::Identity(dim, dim);
  for (const auto& [u, y] : pairs) {
    const Vector bu = dense * u;
    dense += -(bu * bu.transpose()) / u.dot(bu) +
             (y * y.transpose()) / y.dot(u);
  }
  for (int trial = 0; trial < 5; ++trial) {
    const Vector v = random_matrix(dim, 1);
    CHECK((compact.apply(v) - dense * v).norm() <= 1e-8 * v.norm());
  }
}

TEST_CASE("pqn_minimize") {
  SolverConfig cfg;

  SUBCASE("huge lambda drives every coordinate to zero") {
    AlignmentContext ctx = separable_context(10, 6, 0.0, 42);
    // bound on the data-term gradient magnitude at any s in the box
    const double bound =
        (2.0 / ctx.sigma_sq) * ctx.g_centered.cwiseAbs().sum() *
        ctx.x.cwiseAbs().maxCoeff() * ctx.x.cwiseAbs().maxCoeff() * 4.0;
    ctx.lambda = bound + 1.0;
    const SolveResult result = pqn_minimize(ctx, cfg);
    CHECK(result.s.cwiseAbs().maxCoeff() <= 1e-9);
  }

  SUBCASE("zero objective terminates immediately at the start") {
    AlignmentContext ctx{Matrix::Zero(8, 8), random_matrix(8, 5), 1.0, 0.0};
    const SolveResult result = pqn_minimize(ctx, cfg);
    CHECK(result.converged);
    CHECK(result.iterations == 0);
    CHECK(result.s == Vector::Ones(5));
  }

  SUBCASE("trace is monotone and iterates stay feasible") {
    for (unsigned seed : {1u, 2u, 3u}) {
      const AlignmentContext ctx = separable_context(12, 8, 0.1, seed);
      const SolveResult result = pqn_minimize(ctx, cfg);
      for (std::size_t i = 1; i < result.trace.size(); ++i)
        CHECK(result.trace[i] <= result.trace[i - 1] + 1e-12);
      CHECK((result.s.array() >= 0.0).all());
      CHECK((result.s.array() <= 1.0).all());
    }
  }

  SUBCASE("deterministic") {
    const AlignmentContext ctx = separable_context(10, 7, 0.05, 9);
    const SolveResult a = pqn_minimize(ctx, cfg);
    const SolveResult b = pqn_minimize(ctx, cfg);
    CHECK(a.s == b.s);
    CHECK(a.trace == b.trace);
  }

  SUBCASE("invalid config rejected") {
    const AlignmentContext ctx = separable_context(6, 4, 0.0, 5);
    SolverConfig bad = cfg;
    bad.armijo_c1 = 1.5;
    CHECK_THROWS_AS(pqn_minimize(ctx, bad), ConfigError);
    bad = cfg;
    bad.bb_min = 0.0;
    CHECK_THROWS_AS(pqn_minimize(ctx, bad), ConfigError);
  }
}
