#include <benchmark/benchmark.h>

#include "cdmafs/affinity.hpp"
#include "cdmafs/alignment.hpp"
#include "cdmafs/dataset.hpp"
#include "cdmafs/diffusion.hpp"

namespace {

using namespace cdmafs;

MultiViewDataset make_dataset(int n, int informative, int noise) {
  return generate_synthetic(n, 3, informative, noise, 1.0, 42);
}

void BM_ObjectiveGradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int d = static_cast<int>(state.range(1));
  MultiViewDataset ds = make_dataset(n, d / 2, d - d / 2);
  normalize_unit_length(ds);
  AffinityConfig affinity;
  const Matrix p =
      row_normalize(build_similarity(ds.views[0].data, affinity)).p;
  const FusedGraph fused = cross_diffuse({p, p}, DiffusionConfig{});
  AlignmentContext ctx{center(fused.g), ds.views[0].data, 1.0, 0.1};
  Vector s = Vector::Constant(d, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(ctx, s));
  }
}
BENCHMARK(BM_ObjectiveGradient)
    ->Args({100, 50})
    ->Args({200, 100})
    ->Args({400, 100});

void BM_CrossDiffusion(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  MultiViewDataset ds = make_dataset(n, 10, 40);
  normalize_unit_length(ds);
  AffinityConfig affinity;
  std::vector<Matrix> transitions;
  for (const ViewMatrix& view : ds.views)
    transitions.push_back(row_normalize(build_similarity(view.data, affinity)).p);
  DiffusionConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cross_diffuse(transitions, config));
  }
}
BENCHMARK(BM_CrossDiffusion)->Arg(100)->Arg(200)->Arg(400);

void BM_RbfKernel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int d = 100;
  MultiViewDataset ds = make_dataset(n, 50, 50);
  Vector s = Vector::Constant(d, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rbf_kernel(ds.views[0].data, s, 1.0));
  }
}
BENCHMARK(BM_RbfKernel)->Arg(100)->Arg(200)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
