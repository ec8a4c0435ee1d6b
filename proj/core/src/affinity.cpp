#include "cdmafs/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cdmafs/errors.hpp"

namespace cdmafs {

namespace {

// Pairwise squared Euclidean distances, clamped at zero.
Matrix squared_distances(const Matrix& x) {
  const Vector sq = x.rowwise().squaredNorm();
  Matrix d2 = sq.replicate(1, x.rows()) + sq.transpose().replicate(x.rows(), 1)
              - 2.0 * (x * x.transpose());
  return d2.cwiseMax(0.0);
}

}  // namespace

Matrix build_similarity(const Matrix& x, const AffinityConfig& config) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw ConfigError("similarity needs at least 2 instances");
  Matrix w;
  switch (config.weighting) {
    case Weighting::Gaussian: {
      if (config.sigma_sq <= 0) throw ConfigError("sigma_sq must be > 0");
      w = (-squared_distances(x) / config.sigma_sq).array().exp();
      break;
    }
    case Weighting::DotProduct: {
      w = (x * x.transpose()).cwiseMax(0.0);
      break;
    }
    case Weighting::ZeroOneKnn: {
      if (config.k < 1 || config.k >= n)
        throw ConfigError("knn size must satisfy 1 <= k < n");
      const Matrix d2 = squared_distances(x);
      w = Matrix::Zero(n, n);
      std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
      for (Eigen::Index j = 0; j < n; ++j) {
        std::iota(order.begin(), order.end(), 0);
        // stable sort keeps the lower-index tie break deterministic
        std::stable_sort(order.begin(), order.end(),
                         [&](Eigen::Index a, Eigen::Index b) {
                           return d2(a, j) < d2(b, j);
                         });
        int taken = 0;
        for (Eigen::Index i : order) {
          if (i == j) continue;
          w(i, j) = 1.0;
          if (++taken == config.k) break;
        }
      }
      break;
    }
  }
  w.diagonal().setZero();
  return w;
}

RowNormalizeResult row_normalize(const Matrix& w) {
  const Eigen::Index n = w.rows();
  if (w.cols() != n) throw ConfigError("similarity matrix must be square");
  if ((w.array() < 0).any())
    throw DataError("similarity matrix has negative entries");
  Matrix wz = w;
  wz.diagonal().setZero();
  RowNormalizeResult result;
  result.p = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sum = wz.row(i).sum();
    if (sum > 0) {
      result.p.row(i) = wz.row(i) / sum;
    } else {
      result.p.row(i).setConstant(1.0 / static_cast<double>(n - 1));
      result.p(i, i) = 0.0;
      result.zero_rows.push_back(static_cast<int>(i));
    }
  }
  return result;
}

}  // namespace cdmafs
