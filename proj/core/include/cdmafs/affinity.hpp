#pragma once

#include <vector>

#include "cdmafs/dataset.hpp"

namespace cdmafs {

enum class Weighting { Gaussian, DotProduct, ZeroOneKnn };

struct AffinityConfig {
  Weighting weighting = Weighting::ZeroOneKnn;
  double sigma_sq = 1.0;  // gaussian bandwidth
  int k = 5;              // neighbor count for zero-one-knn
};

// n x n non-negative similarity matrix with zero diagonal.
//   gaussian:     W_ij = exp(-|x_i - x_j|^2 / sigma_sq)
//   dot-product:  W_ij = max(x_i . x_j, 0)
//   zero-one-knn: W_ij = 1 iff x_i is among x_j's k nearest neighbors
//                 (Euclidean, ties broken by lower index)
Matrix build_similarity(const Matrix& x, const AffinityConfig& config);

struct RowNormalizeResult {
  Matrix p;                    // row-stochastic, zero diagonal
  std::vector<int> zero_rows;  // rows that fell back to uniform
};

// P_ij = W_ij / sum_k W_ik. All-zero rows become uniform over the
// off-diagonal entries so the result stays row-stochastic.
RowNormalizeResult row_normalize(const Matrix& w);

}  // namespace cdmafs
