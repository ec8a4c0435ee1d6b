#pragma once

#include <vector>

#include "cdmafs/dataset.hpp"

namespace cdmafs {

struct DiffusionConfig {
  double alpha = 0.01;  // identity regularization added each iteration
  int max_iters = 20;
  double tol = 1e-8;  // relative Frobenius-change stopping tolerance
  int k_fuse = 5;     // neighbor count when sparsifying P* into G
};

struct FusedGraph {
  Matrix p_star;  // averaged final status matrix
  Matrix g;       // symmetric, non-negative, zero-diagonal kNN graph
  int iterations_run = 0;
  bool converged = false;
  double last_delta = 0.0;  // max relative Frobenius change at the last step
};

// Alternating cross diffusion over m >= 2 views:
//   P_{t+1}^(v) = P^(v) * mean_{i != v}(P_t^(i)) * P^(v)^T + alpha * I
// starting from P_1^(v) = P^(v). P* is the average of the final status
// matrices; G is its symmetrized, zero-diagonal, per-row top-k_fuse
// sparsification unioned with its transpose (weights kept).
FusedGraph cross_diffuse(const std::vector<Matrix>& transitions,
                         const DiffusionConfig& config);

// Explicit two-view recursion (the m=2 special case written out as two
// alternating updates). Kept as a separate code path so tests can check it
// agrees bitwise with the generic rule.
FusedGraph cross_diffuse_two_view(const Matrix& p1, const Matrix& p2,
                                  const DiffusionConfig& config);

// Symmetrize, zero the diagonal, keep each row's top-k entries and union
// with the transpose. Exposed for tests.
Matrix sparsify_symmetric_knn(const Matrix& p_star, int k_fuse);

// Diagnostic: compares the alpha=0 two-view recursion at odd step 2t+1
// against its closed-form unrolling (P1*P2)^t * P1 * (P2^T*P1^T)^t, after
// scaling both sides to unit Frobenius norm. Returns the max absolute
// deviation.
double unrolled_check(const Matrix& p1, const Matrix& p2, int t);

struct ComponentPurityReport {
  struct Component {
    std::vector<int> members;
    double purity;  // majority-class fraction, in (0, 1]
  };
  std::vector<Component> components;
  double epsilon = 0.0;  // max over components of (1 - purity)
};

// Connected components of G's nonzero pattern (undirected) scored by
// ground-truth label purity.
ComponentPurityReport component_purity(const Matrix& g,
                                       const std::vector<int>& labels);

}  // namespace cdmafs
