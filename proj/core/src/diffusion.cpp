#include "cdmafs/diffusion.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "cdmafs/errors.hpp"

namespace cdmafs {

namespace {

void check_inputs(const std::vector<Matrix>& transitions,
                  const DiffusionConfig& config) {
  if (transitions.size() < 2)
    throw ConfigError("cross diffusion needs at least 2 views");
  const Eigen::Index n = transitions.front().rows();
  for (const Matrix& p : transitions)
    if (p.rows() != n || p.cols() != n)
      throw DataError("transition matrices must all be n x n");
  if (config.alpha < 0) throw ConfigError("alpha must be >= 0");
  if (config.max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (config.tol < 0) throw ConfigError("tol must be >= 0");
  if (config.k_fuse < 1 || config.k_fuse >= n)
    throw ConfigError("k_fuse must satisfy 1 <= k_fuse < n");
}

FusedGraph finalize(std::vector<Matrix> status, int iterations, bool converged,
                    double delta, int k_fuse) {
  FusedGraph out;
  out.p_star = status.front();
  for (std::size_t v = 1; v < status.size(); ++v) out.p_star += status[v];
  out.p_star /= static_cast<double>(status.size());
  out.g = sparsify_symmetric_knn(out.p_star, k_fuse);
  out.iterations_run = iterations;
  out.converged = converged;
  out.last_delta = delta;
  return out;
}

}  // namespace

Matrix sparsify_symmetric_knn(const Matrix& p_star, int k_fuse) {
  const Eigen::Index n = p_star.rows();
  Matrix sym = 0.5 * (p_star + p_star.transpose());
  sym.diagonal().setZero();
  // keep[i][j] marks j as one of row i's top-k_fuse entries
  Eigen::ArrayXX<bool> keep = Eigen::ArrayXX<bool>::Constant(n, n, false);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) {
                       return sym(i, a) > sym(i, b);
                     });
    int taken = 0;
    for (Eigen::Index j : order) {
      if (j == i) continue;
      keep(i, j) = true;
      if (++taken == k_fuse) break;
    }
  }
  Matrix g = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (keep(i, j) || keep(j, i)) g(i, j) = sym(i, j);
  return g;
}

FusedGraph cross_diffuse(const std::vector<Matrix>& transitions,
                         const DiffusionConfig& config) {
  check_inputs(transitions, config);
  const std::size_t m = transitions.size();
  const Eigen::Index n = transitions.front().rows();
  const Matrix reg = config.alpha * Matrix::Identity(n, n);

  std::vector<Matrix> status(transitions.begin(), transitions.end());
  std::vector<Matrix> next(m);
  int iter = 0;
  bool converged = false;
  double delta = 0.0;
  for (; iter < config.max_iters; ++iter) {
    for (std::size_t v = 0; v < m; ++v) {
      Matrix mean = Matrix::Zero(n, n);
      for (std::size_t i = 0; i < m; ++i)
        if (i != v) mean += status[i];
      mean /= static_cast<double>(m - 1);
      next[v] = transitions[v] * mean * transitions[v].transpose() + reg;
    }
    delta = 0.0;
    for (std::size_t v = 0; v < m; ++v)
      delta = std::max(delta,
                       (next[v] - status[v]).norm() / status[v].norm());
    status.swap(next);
    if (delta < config.tol) {
      converged = true;
      ++iter;
      break;
    }
  }
  return finalize(std::move(status), iter, converged, delta, config.k_fuse);
}

FusedGraph cross_diffuse_two_view(const Matrix& p1, const Matrix& p2,
                                  const DiffusionConfig& config) {
  check_inputs({p1, p2}, config);
  const Eigen::Index n = p1.rows();
  const Matrix reg = config.alpha * Matrix::Identity(n, n);

  Matrix s1 = p1, s2 = p2;
  int iter = 0;
  bool converged = false;
  double delta = 0.0;
  for (; iter < config.max_iters; ++iter) {
    // mean over the single other view, written with the same arithmetic as
    // the generic path so the two agree bitwise
    Matrix n1 = p1 * (s2 / 1.0) * p1.transpose() + reg;
    Matrix n2 = p2 * (s1 / 1.0) * p2.transpose() + reg;
    delta = std::max((n1 - s1).norm() / s1.norm(),
                     (n2 - s2).norm() / s2.norm());
    s1.swap(n1);
    s2.swap(n2);
    if (delta < config.tol) {
      converged = true;
      ++iter;
      break;
    }
  }
  std::vector<Matrix> status;
  status.push_back(std::move(s1));
  status.push_back(std::move(s2));
  return finalize(std::move(status), iter, converged, delta, config.k_fuse);
}

double unrolled_check(const Matrix& p1, const Matrix& p2, int t) {
  if (t < 1) throw ConfigError("t must be >= 1");
  const Eigen::Index n = p1.rows();
  if (p2.rows() != n || p1.cols() != n || p2.cols() != n)
    throw DataError("matrices must be square and same size");

  // iterate the alpha=0 recursion from step 1 to step 2t+1
  Matrix s1 = p1, s2 = p2;
  for (int step = 1; step < 2 * t + 1; ++step) {
    Matrix n1 = p1 * s2 * p1.transpose();
    Matrix n2 = p2 * s1 * p2.transpose();
    s1 = std::move(n1);
    s2 = std::move(n2);
  }

  Matrix ab = Matrix::Identity(n, n);
  const Matrix prod = p1 * p2;
  for (int i = 0; i < t; ++i) ab = ab * prod;
  Matrix closed = ab * p1 * ab.transpose();

  s1 /= s1.norm();
  closed /= closed.norm();
  return (s1 - closed).cwiseAbs().maxCoeff();
}

ComponentPurityReport component_purity(const Matrix& g,
                                       const std::vector<int>& labels) {
  const Eigen::Index n = g.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw DataError("component purity requires labels for every instance");

  std::vector<int> component(static_cast<std::size_t>(n), -1);
  int count = 0;
  std::vector<Eigen::Index> stack;
  for (Eigen::Index start = 0; start < n; ++start) {
    if (component[static_cast<std::size_t>(start)] != -1) continue;
    stack.push_back(start);
    component[static_cast<std::size_t>(start)] = count;
    while (!stack.empty()) {
      const Eigen::Index i = stack.back();
      stack.pop_back();
      for (Eigen::Index j = 0; j < n; ++j) {
        if ((g(i, j) != 0.0 || g(j, i) != 0.0) &&
            component[static_cast<std::size_t>(j)] == -1) {
          component[static_cast<std::size_t>(j)] = count;
          stack.push_back(j);
        }
      }
    }
    ++count;
  }

  ComponentPurityReport report;
  report.components.resize(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < n; ++i)
    report.components[static_cast<std::size_t>(component[
        static_cast<std::size_t>(i)])].members.push_back(static_cast<int>(i));
  for (auto& comp : report.components) {
    std::map<int, int> votes;
    for (int i : comp.members)
      ++votes[labels[static_cast<std::size_t>(i)]];
    int majority = 0;
    for (const auto& [label, c] : votes) majority = std::max(majority, c);
    comp.purity =
        static_cast<double>(majority) / static_cast<double>(comp.members.size());
    report.epsilon = std::max(report.epsilon, 1.0 - comp.purity);
  }
  return report;
}

}  // namespace cdmafs
