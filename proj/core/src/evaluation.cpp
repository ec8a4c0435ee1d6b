#include "cdmafs/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <Eigen/Eigenvalues>

#include "cdmafs/errors.hpp"

namespace cdmafs {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Matrix kmeanspp_init(const Matrix& data, int k, std::mt19937_64& rng) {
  const Eigen::Index n = data.rows();
  Matrix centers(k, data.cols());
  const Eigen::Index first =
      static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(n));
  centers.row(0) = data.row(first);
  Vector d2 = (data.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0) {
      double target = uniform01(rng) * total;
      for (; pick < n - 1; ++pick) {
        target -= d2(pick);
        if (target <= 0) break;
      }
    } else {
      pick = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(n));
    }
    centers.row(c) = data.row(pick);
    d2 = d2.cwiseMin(
        (data.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

ClusterAssignment lloyd(const Matrix& data, int k, std::mt19937_64& rng) {
  const Eigen::Index n = data.rows();
  Matrix centers = kmeanspp_init(data, k, rng);
  ClusterAssignment out;
  out.k = k;
  out.ids.assign(static_cast<std::size_t>(n), -1);

  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (data.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (data.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (out.ids[static_cast<std::size_t>(i)] != best) {
        out.ids[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed) break;
    Matrix sums = Matrix::Zero(k, data.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(out.ids[static_cast<std::size_t>(i)]) += data.row(i);
      ++counts[static_cast<std::size_t>(out.ids[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0)
        centers.row(c) =
            sums.row(c) / counts[static_cast<std::size_t>(c)];
    // empty clusters keep their previous center
  }

  out.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    out.inertia +=
        (data.row(i) - centers.row(out.ids[static_cast<std::size_t>(i)]))
            .squaredNorm();
  return out;
}

std::vector<int> compact_labels(const std::vector<int>& raw, int* count) {
  std::map<int, int> remap;
  std::vector<int> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [it, inserted] =
        remap.emplace(raw[i], static_cast<int>(remap.size()));
    out[i] = it->second;
  }
  *count = static_cast<int>(remap.size());
  return out;
}

Matrix contingency(const std::vector<int>& a, int ka,
                   const std::vector<int>& b, int kb) {
  Matrix c = Matrix::Zero(ka, kb);
  for (std::size_t i = 0; i < a.size(); ++i) c(a[i], b[i]) += 1.0;
  return c;
}

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / n)};
}

}  // namespace

std::vector<int> min_cost_assignment(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw ConfigError("cost matrix must be square");
  // Hungarian algorithm with potentials, O(n^3); 1-indexed internals.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<int> p(static_cast<std::size_t>(n + 1), 0);
  std::vector<int> way(static_cast<std::size_t>(n + 1), 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<bool> used(static_cast<std::size_t>(n + 1), false);
    do {
      used[static_cast<std::size_t>(j0)] = true;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) -
                           u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> col_of_row(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (p[static_cast<std::size_t>(j)] > 0)
      col_of_row[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] =
          j - 1;
  return col_of_row;
}

double clustering_accuracy(const std::vector<int>& pred,
                           const std::vector<int>& truth) {
  if (pred.size() != truth.size() || pred.empty())
    throw DataError("accuracy requires equal-length non-empty partitions");
  int kp = 0, kc = 0;
  const std::vector<int> a = compact_labels(pred, &kp);
  const std::vector<int> b = compact_labels(truth, &kc);
  const int k = std::max(kp, kc);
  const Matrix counts = contingency(a, kp, b, kc);
  // pad to square and negate: max-weight matching as min-cost assignment
  Matrix cost = Matrix::Zero(k, k);
  cost.topLeftCorner(kp, kc) = -counts;
  const std::vector<int> match = min_cost_assignment(cost);
  double matched = 0.0;
  for (int r = 0; r < kp; ++r)
    if (match[static_cast<std::size_t>(r)] < kc)
      matched += counts(r, match[static_cast<std::size_t>(r)]);
  return matched / static_cast<double>(pred.size());
}

double nmi(const std::vector<int>& a_raw, const std::vector<int>& b_raw) {
  if (a_raw.size() != b_raw.size() || a_raw.empty())
    throw DataError("nmi requires equal-length non-empty partitions");
  int ka = 0, kb = 0;
  const std::vector<int> a = compact_labels(a_raw, &ka);
  const std::vector<int> b = compact_labels(b_raw, &kb);
  const double n = static_cast<double>(a.size());
  const Matrix c = contingency(a, ka, b, kb);
  const Vector pa = c.rowwise().sum() / n;
  const Vector pb = c.colwise().sum().transpose() / n;

  double ha = 0.0, hb = 0.0, mi = 0.0;
  for (int i = 0; i < ka; ++i)
    if (pa(i) > 0) ha -= pa(i) * std::log(pa(i));
  for (int j = 0; j < kb; ++j)
    if (pb(j) > 0) hb -= pb(j) * std::log(pb(j));
  for (int i = 0; i < ka; ++i)
    for (int j = 0; j < kb; ++j) {
      const double pij = c(i, j) / n;
      if (pij > 0) mi += pij * std::log(pij / (pa(i) * pb(j)));
    }
  const double h = std::max(ha, hb);
  if (h == 0.0) return 1.0;  // both single-cluster: identical partitions
  return std::clamp(mi / h, 0.0, 1.0);
}

KMeansResult kmeans(const Matrix& data, int k, int repeats,
                    std::uint64_t seed) {
  if (k < 1 || k > data.rows())
    throw ConfigError("kmeans requires 1 <= k <= n");
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  KMeansResult result;
  for (int r = 0; r < repeats; ++r) {
    std::mt19937_64 rng(splitmix64(seed + static_cast<std::uint64_t>(r)));
    result.repeats.push_back(lloyd(data, k, rng));
  }
  result.best = *std::min_element(
      result.repeats.begin(), result.repeats.end(),
      [](const ClusterAssignment& x, const ClusterAssignment& y) {
        return x.inertia < y.inertia;
      });
  return result;
}

MetricsReport evaluate_selection(
    const MultiViewDataset& dataset,
    const std::vector<std::vector<int>>& selected_per_view, int k,
    int repeats, std::uint64_t seed, EvalMode mode) {
  if (!dataset.has_labels())
    throw DataError("evaluation requires ground-truth labels");
  if (selected_per_view.size() != dataset.view_count())
    throw ConfigError("one selection per view required");
  std::size_t total = 0;
  for (const auto& sel : selected_per_view) total += sel.size();
  if (total == 0) throw ConfigError("empty selection");

  const Eigen::Index n = dataset.instance_count();
  std::vector<Matrix> restricted;
  for (std::size_t v = 0; v < dataset.view_count(); ++v) {
    const Matrix& x = dataset.views[v].data;
    Matrix r(n, static_cast<Eigen::Index>(selected_per_view[v].size()));
    for (std::size_t j = 0; j < selected_per_view[v].size(); ++j) {
      const int col = selected_per_view[v][j];
      if (col < 0 || col >= x.cols())
        throw ConfigError("selected feature index out of range");
      r.col(static_cast<Eigen::Index>(j)) = x.col(col);
    }
    restricted.push_back(std::move(r));
  }

  std::vector<Matrix> eval_inputs;
  if (mode == EvalMode::Concatenated) {
    Matrix stacked(n, static_cast<Eigen::Index>(total));
    Eigen::Index offset = 0;
    for (const Matrix& r : restricted) {
      stacked.middleCols(offset, r.cols()) = r;
      offset += r.cols();
    }
    eval_inputs.push_back(std::move(stacked));
  } else {
    eval_inputs = restricted;
  }

  MetricsReport report;
  report.repeats = repeats;
  for (int rep = 0; rep < repeats; ++rep) {
    double acc = 0.0, mi = 0.0;
    for (std::size_t e = 0; e < eval_inputs.size(); ++e) {
      const KMeansResult km =
          kmeans(eval_inputs[e], k, 1,
                 seed + (static_cast<std::uint64_t>(e) << 32) +
                     static_cast<std::uint64_t>(rep));
      acc += clustering_accuracy(km.best.ids, dataset.labels);
      mi += nmi(km.best.ids, dataset.labels);
    }
    report.accuracy_runs.push_back(acc /
                                   static_cast<double>(eval_inputs.size()));
    report.nmi_runs.push_back(mi / static_cast<double>(eval_inputs.size()));
  }
  std::tie(report.accuracy_mean, report.accuracy_std) =
      mean_std(report.accuracy_runs);
  std::tie(report.nmi_mean, report.nmi_std) = mean_std(report.nmi_runs);
  return report;
}

Matrix spectral_embedding(const Matrix& g, int k) {
  const Eigen::Index n = g.rows();
  if (k < 1 || k > n) throw ConfigError("embedding size out of range");
  Vector deg = g.rowwise().sum();
  Vector dinv(n);
  for (Eigen::Index i = 0; i < n; ++i)
    dinv(i) = deg(i) > 0 ? 1.0 / std::sqrt(deg(i)) : 0.0;
  const Matrix a = dinv.asDiagonal() * g * dinv.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (a + a.transpose()));
  Matrix embed = solver.eigenvectors().rightCols(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = embed.row(i).norm();
    if (norm > 0) embed.row(i) /= norm;
  }
  return embed;
}

}  // namespace cdmafs
