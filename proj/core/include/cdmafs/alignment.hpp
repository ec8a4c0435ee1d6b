#pragma once

#include "cdmafs/dataset.hpp"

namespace cdmafs {

// K_ij = exp(-(1/sigma_sq) * sum_p s_p^2 * (x_ip - x_jp)^2).
// Symmetric with unit diagonal; entries in (0, 1].
Matrix rbf_kernel(const Matrix& x, const Vector& s, double sigma_sq);

// H * M * H with H = I - (1/n) * 1 * 1^T, computed by subtracting row and
// column means and adding back the grand mean.
Matrix center(const Matrix& m);

enum class AlignmentVariant { Normalized, Unnormalized, Centered };

// normalized:   Tr(K1*K2) / (|K1|_F * |K2|_F)
// unnormalized: Tr(K1*K2)
// centered:     Tr(H*K1*H*K2)
double alignment_score(const Matrix& k1, const Matrix& k2,
                       AlignmentVariant variant);

// Everything needed to evaluate the selection objective for one view.
// g_centered is H*G*H, precomputed once per fused graph.
struct AlignmentContext {
  Matrix g_centered;
  Matrix x;  // n x D view data
  double sigma_sq = 1.0;
  double lambda = 0.0;

  Eigen::Index feature_count() const { return x.cols(); }
};

struct Evaluation {
  double value;
  Vector grad;
};

// f(s) = -sum_ij (HGH)_ij * K_ij + lambda * sum_p s_p
double objective(const AlignmentContext& ctx, const Vector& s);

// df/ds_p = (2 s_p / sigma_sq) * sum_ij ((HGH) o K)_ij (x_ip - x_jp)^2
//           + lambda
Vector gradient(const AlignmentContext& ctx, const Vector& s);

// Objective and gradient at one iterate; the (HGH) o K product is formed
// once and shared.
Evaluation evaluate(const AlignmentContext& ctx, const Vector& s);

// Median of squared pairwise distances, usable as a sigma_sq heuristic.
double median_squared_distance(const Matrix& x);

}  // namespace cdmafs
