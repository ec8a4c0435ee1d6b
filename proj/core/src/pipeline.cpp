#include "cdmafs/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cdmafs/errors.hpp"

namespace cdmafs {

namespace {

int selected_count(const Vector& s, double threshold) {
  return static_cast<int>((s.array() >= threshold).count());
}

std::vector<int> top_by_score(const Vector& s, int d) {
  std::vector<int> order(static_cast<std::size_t>(s.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return s(a) > s(b); });
  order.resize(static_cast<std::size_t>(d));
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

ViewSelection lambda_search(const AlignmentContext& ctx, int target_d,
                            const SelectionRequest& request,
                            const SolverConfig& solver_config) {
  if (target_d < 1 || target_d > ctx.feature_count())
    throw ConfigError("target_d must satisfy 1 <= d <= D");
  if (request.slack < 0) throw ConfigError("slack must be >= 0");
  if (!(request.lambda_lo > 0) || !(request.lambda_lo < request.lambda_hi))
    throw ConfigError("lambda bracket must satisfy 0 < lo < hi");

  ViewSelection best;
  AlignmentContext probe_ctx = ctx;
  Vector warm;
  int best_gap = -1;

  const auto probe = [&](double lambda) {
    probe_ctx.lambda = lambda;
    const Vector* start = warm.size() ? &warm : nullptr;
    SolveResult solved = pqn_minimize(probe_ctx, solver_config, start);
    warm = solved.s;
    const int count = selected_count(solved.s, request.rounding_threshold);
    best.probes.push_back({lambda, count, solved.trace.back()});
    const int gap = std::abs(count - target_d);
    if (best_gap < 0 || gap < best_gap ||
        (gap == best_gap && lambda < best.lambda_star)) {
      best_gap = gap;
      best.lambda_star = lambda;
      best.s = solved.s;
      best.trace = solved.trace;
      best.line_search_failed = solved.line_search_failed;
    }
    return count;
  };

  const auto window = [&](int count) {
    return std::abs(count - target_d) <= request.slack;
  };

  double lo = request.lambda_lo;
  double hi = request.lambda_hi;
  int c_lo = probe(lo);
  bool done = window(c_lo);
  int c_hi = c_lo;
  if (!done) {
    c_hi = probe(hi);
    done = window(c_hi);
  }
  // expand until the bracket straddles the target
  while (!done && c_lo < target_d && lo > 1e-8) {
    lo *= 0.5;
    c_lo = probe(lo);
    done = window(c_lo);
  }
  while (!done && c_hi > target_d && hi < 1e8) {
    hi *= 2.0;
    c_hi = probe(hi);
    done = window(c_hi);
  }

  if (!done && c_lo >= target_d && c_hi <= target_d) {
    for (int i = 0; i < request.max_bisections && !done; ++i) {
      const double mid = std::sqrt(lo * hi);  // lambda lives on a log scale
      const int c_mid = probe(mid);
      if (window(c_mid)) {
        done = true;
      } else if (c_mid > target_d) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }

  best.count_in_window = best_gap >= 0 && best_gap <= request.slack;
  for (int p = 0; p < best.s.size(); ++p)
    if (best.s(p) >= request.rounding_threshold)
      best.raw_selected.push_back(p);
  best.selected = top_by_score(best.s, target_d);
  return best;
}

SelectionResult select_features(const MultiViewDataset& dataset,
                                const PipelineConfig& config) {
  MultiViewDataset working = dataset;
  working.validate();
  if (config.normalize) normalize_unit_length(working);

  std::vector<Matrix> transitions;
  transitions.reserve(working.view_count());
  for (const ViewMatrix& view : working.views)
    transitions.push_back(
        row_normalize(build_similarity(view.data, config.affinity)).p);

  const FusedGraph fused = cross_diffuse(transitions, config.diffusion);
  return select_features(working, config, fused);
}

SelectionResult select_features(const MultiViewDataset& dataset,
                                const PipelineConfig& config,
                                const FusedGraph& fused) {
  MultiViewDataset working = dataset;
  working.validate();
  if (config.normalize) normalize_unit_length(working);
  if (config.request.target_d.size() != working.view_count())
    throw ConfigError("target_d must list one count per view");

  SelectionResult result;
  result.diffusion_iterations = fused.iterations_run;
  result.diffusion_converged = fused.converged;

  const Matrix g_centered = center(fused.g);
  for (std::size_t v = 0; v < working.view_count(); ++v) {
    const int d = config.request.target_d[v];
    if (d < 1 || d > working.views[v].cols())
      throw ConfigError("target_d for view " + std::to_string(v) +
                        " out of range");
    AlignmentContext ctx{g_centered, working.views[v].data,
                         config.kernel_sigma_sq, 0.0};
    ViewSelection sel =
        lambda_search(ctx, d, config.request, config.solver);
    sel.view_index = static_cast<int>(v);
    result.views.push_back(std::move(sel));
  }
  return result;
}

}  // namespace cdmafs
