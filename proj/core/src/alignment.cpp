#include "cdmafs/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cdmafs/errors.hpp"

namespace cdmafs {

Matrix rbf_kernel(const Matrix& x, const Vector& s, double sigma_sq) {
  if (sigma_sq <= 0) throw ConfigError("sigma_sq must be > 0");
  if (s.size() != x.cols())
    throw ConfigError("selection vector length must match feature count");
  // weight features by s_p, i.e. s_p^2 inside the squared norm
  const Matrix y = x * s.asDiagonal();
  const Vector sq = y.rowwise().squaredNorm();
  Matrix d2 = sq.replicate(1, y.rows()) + sq.transpose().replicate(y.rows(), 1)
              - 2.0 * (y * y.transpose());
  d2 = d2.cwiseMax(0.0);
  Matrix k = (-d2 / sigma_sq).array().exp();
  // exact symmetry and unit diagonal
  k = 0.5 * (k + k.transpose());
  k.diagonal().setOnes();
  return k;
}

Matrix center(const Matrix& m) {
  const double n = static_cast<double>(m.rows());
  const Vector row_means = m.rowwise().mean();
  const Eigen::RowVectorXd col_means = m.colwise().mean();
  const double grand = m.sum() / (n * static_cast<double>(m.cols()));
  Matrix out = m;
  out.colwise() -= row_means;
  out.rowwise() -= col_means;
  out.array() += grand;
  return out;
}

double alignment_score(const Matrix& k1, const Matrix& k2,
                       AlignmentVariant variant) {
  if (k1.rows() != k2.rows() || k1.cols() != k2.cols())
    throw ConfigError("alignment requires same-size matrices");
  switch (variant) {
    case AlignmentVariant::Unnormalized:
      return (k1.array() * k2.transpose().array()).sum();
    case AlignmentVariant::Normalized: {
      const double n1 = k1.norm(), n2 = k2.norm();
      if (n1 == 0.0 || n2 == 0.0)
        throw ConfigError("normalized alignment undefined for zero matrix");
      return (k1.array() * k2.transpose().array()).sum() / (n1 * n2);
    }
    case AlignmentVariant::Centered:
      return (center(k1).array() * k2.transpose().array()).sum();
  }
  return 0.0;
}

Evaluation evaluate(const AlignmentContext& ctx, const Vector& s) {
  const Matrix& x = ctx.x;
  const Eigen::Index d = x.cols();
  if (s.size() != d)
    throw ConfigError("selection vector length must match feature count");

  const Matrix k = rbf_kernel(x, s, ctx.sigma_sq);
  const Matrix m = ctx.g_centered.cwiseProduct(k);  // (HGH) o K

  Evaluation eval;
  eval.value = -m.sum() + ctx.lambda * s.sum();

  // sum_ij M_ij (x_ip - x_jp)^2
  //   = sum_i r_i x_ip^2 + sum_j c_j x_jp^2 - 2 sum_ij M_ij x_ip x_jp
  const Vector r = m.rowwise().sum();
  const Vector c = m.colwise().sum().transpose();
  const Matrix x2 = x.cwiseProduct(x);
  const Vector quad = x2.transpose() * (r + c);
  const Vector cross = (m * x).cwiseProduct(x).colwise().sum().transpose();
  const Vector per_feature = quad - 2.0 * cross;

  eval.grad = (2.0 / ctx.sigma_sq) * s.cwiseProduct(per_feature);
  eval.grad.array() += ctx.lambda;
  return eval;
}

double objective(const AlignmentContext& ctx, const Vector& s) {
  const Matrix k = rbf_kernel(ctx.x, s, ctx.sigma_sq);
  return -ctx.g_centered.cwiseProduct(k).sum() + ctx.lambda * s.sum();
}

Vector gradient(const AlignmentContext& ctx, const Vector& s) {
  return evaluate(ctx, s).grad;
}

double median_squared_distance(const Matrix& x) {
  const Eigen::Index n = x.rows();
  std::vector<double> d2;
  d2.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      d2.push_back((x.row(i) - x.row(j)).squaredNorm());
  if (d2.empty()) return 1.0;
  const std::size_t mid = d2.size() / 2;
  std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid),
                   d2.end());
  return d2[mid];
}

}  // namespace cdmafs
