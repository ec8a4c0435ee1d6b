#pragma once

#include <cstdint>
#include <vector>

#include "cdmafs/dataset.hpp"

namespace cdmafs {

struct ClusterAssignment {
  std::vector<int> ids;  // length n, values in [0, k)
  int k = 0;
  double inertia = 0.0;  // within-cluster sum of squares
};

struct KMeansResult {
  ClusterAssignment best;  // lowest inertia across repeats
  std::vector<ClusterAssignment> repeats;
};

// Lloyd's algorithm with k-means++ seeding, one independent run per
// repeat. Deterministic in (seed, repeats).
KMeansResult kmeans(const Matrix& data, int k, int repeats,
                    std::uint64_t seed);

// Fraction of instances whose cluster id maps to their true class under
// the optimal (Kuhn-Munkres) cluster-to-class assignment.
double clustering_accuracy(const std::vector<int>& pred,
                           const std::vector<int>& truth);

// Mutual information normalized by max(H(C), H(C')), clamped to [0, 1].
double nmi(const std::vector<int>& a, const std::vector<int>& b);

// Minimum-cost assignment on a square cost matrix; returns col_of_row.
// Exposed for tests against brute-force enumeration.
std::vector<int> min_cost_assignment(const Matrix& cost);

enum class EvalMode { Concatenated, PerView };

struct MetricsReport {
  double accuracy_mean = 0.0, accuracy_std = 0.0;
  double nmi_mean = 0.0, nmi_std = 0.0;
  int repeats = 0;
  std::vector<double> accuracy_runs, nmi_runs;
};

// Restricts each view to the given feature indices, clusters with kmeans
// (concatenated mode stacks views column-wise) and scores each repeat
// against the dataset labels.
MetricsReport evaluate_selection(
    const MultiViewDataset& dataset,
    const std::vector<std::vector<int>>& selected_per_view, int k,
    int repeats, std::uint64_t seed,
    EvalMode mode = EvalMode::Concatenated);

// Top-k eigenvectors of D^{-1/2} G D^{-1/2}, rows scaled to unit norm.
// Secondary evaluator: cluster the fused graph directly.
Matrix spectral_embedding(const Matrix& g, int k);

}  // namespace cdmafs
