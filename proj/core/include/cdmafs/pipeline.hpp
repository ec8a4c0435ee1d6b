#pragma once

#include <vector>

#include "cdmafs/affinity.hpp"
#include "cdmafs/diffusion.hpp"
#include "cdmafs/solver.hpp"

namespace cdmafs {

struct SelectionRequest {
  std::vector<int> target_d;  // desired feature count per view
  int slack = 10;             // acceptable absolute deviation
  double lambda_lo = 1e-3;    // initial bracket
  double lambda_hi = 10.0;
  double rounding_threshold = 0.999;  // s_p >= threshold counts as selected
  int max_bisections = 25;
};

struct LambdaProbe {
  double lambda;
  int count;
  double objective;
};

struct ViewSelection {
  int view_index = 0;
  double lambda_star = 0.0;
  Vector s;
  std::vector<int> raw_selected;  // indices meeting the rounding rule
  std::vector<int> selected;      // trimmed/topped-up to exactly target_d
  std::vector<LambdaProbe> probes;
  std::vector<double> trace;  // solver trace at lambda_star
  bool count_in_window = false;
  bool line_search_failed = false;
};

struct SelectionResult {
  std::vector<ViewSelection> views;
  int diffusion_iterations = 0;
  bool diffusion_converged = false;
};

struct PipelineConfig {
  bool normalize = true;
  AffinityConfig affinity;
  DiffusionConfig diffusion;
  double kernel_sigma_sq = 1.0;
  SolverConfig solver;
  SelectionRequest request;
};

// Bracket expansion plus bisection on lambda until the selected-feature
// count lands within target_d +- slack. Probes are warm-started from the
// previous solve; returns the closest probe (ties broken by smaller
// lambda) with its full probe log.
ViewSelection lambda_search(const AlignmentContext& ctx, int target_d,
                            const SelectionRequest& request,
                            const SolverConfig& solver_config);

// Full run: per-view transitions, one shared cross diffusion, one shared
// centered G, then an independent lambda search per view.
SelectionResult select_features(const MultiViewDataset& dataset,
                                const PipelineConfig& config);

// Same, but reusing an already fused graph.
SelectionResult select_features(const MultiViewDataset& dataset,
                                const PipelineConfig& config,
                                const FusedGraph& fused);

}  // namespace cdmafs
