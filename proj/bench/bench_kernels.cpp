// Serial reference kernels against the OpenMP ones.
//
// Two configurations of n walls at uniform spacing on [0, 1]:
//   dense     scale = 1  (alpha = 1/n: every pair is within range)
//   screened  scale = n  (alpha = 1: V decays like e^{-2k} in the neighbour
//                         index k, so the cutoff keeps a few dozen diagonals)
// The reference ignores the cutoff by design, so the screened case shows
// what the early exit buys on top of the threading.

#include <benchmark/benchmark.h>

#include <cmath>
#include <limits>
#include <vector>

#include "pileup/kernels.hpp"
#include "pileup/potential.hpp"

namespace {

using pileup::kernels::PairKernel;
namespace k = pileup::kernels;

struct Setup {
  std::vector<double> nodes;
  double scale;
  double cutoff;
};

Setup make(const benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const bool screened = st.range(1) != 0;
  Setup s;
  s.nodes.resize(n + 1);
  for (int i = 0; i <= n; ++i) s.nodes[i] = static_cast<double>(i) / n;
  s.scale = screened ? static_cast<double>(n) : 1.0;
  s.cutoff = pileup::potential::cutoff_distance(1e-20);
  return s;
}

void label(benchmark::State& st) { st.SetLabel(st.range(1) ? "screened" : "dense"); }

void BM_PairSum_Reference(benchmark::State& st) {
  const Setup s = make(st);
  for (auto _ : st) benchmark::DoNotOptimize(k::reference::pair_sum(PairKernel::Wall, s.nodes, s.scale));
  label(st);
}

void BM_PairSum_OpenMP(benchmark::State& st) {
  const Setup s = make(st);
  for (auto _ : st) benchmark::DoNotOptimize(k::pair_sum(PairKernel::Wall, s.nodes, s.scale, s.cutoff));
  label(st);
}

void BM_Gradient_Reference(benchmark::State& st) {
  const Setup s = make(st);
  std::vector<double> g(s.nodes.size());
  for (auto _ : st) {
    benchmark::DoNotOptimize(k::reference::pair_sum_gradient(PairKernel::Wall, s.nodes, s.scale, g));
    benchmark::ClobberMemory();
  }
  label(st);
}

void BM_Gradient_OpenMP(benchmark::State& st) {
  const Setup s = make(st);
  std::vector<double> g(s.nodes.size());
  for (auto _ : st) {
    benchmark::DoNotOptimize(k::pair_sum_gradient(PairKernel::Wall, s.nodes, s.scale, s.cutoff, g));
    benchmark::ClobberMemory();
  }
  label(st);
}

// The reference curvature is a cubic range-add loop; keep its n small.
void BM_Curvature_Reference(benchmark::State& st) {
  const Setup s = make(st);
  std::vector<double> c(s.nodes.size() - 1);
  for (auto _ : st) {
    k::reference::pair_gap_curvature(PairKernel::Wall, s.nodes, s.scale, c);
    benchmark::ClobberMemory();
  }
  label(st);
}

void BM_Curvature_OpenMP(benchmark::State& st) {
  const Setup s = make(st);
  std::vector<double> c(s.nodes.size() - 1);
  for (auto _ : st) {
    k::pair_gap_curvature(PairKernel::Wall, s.nodes, s.scale, s.cutoff, c);
    benchmark::ClobberMemory();
  }
  label(st);
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int n : {256, 1024, 4096})
    for (int screened : {0, 1}) b->Args({n, screened});
}

void small_sizes(benchmark::internal::Benchmark* b) {
  for (int n : {128, 256, 512})
    for (int screened : {0, 1}) b->Args({n, screened});
}

}  // namespace

BENCHMARK(BM_PairSum_Reference)->Apply(sizes)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PairSum_OpenMP)->Apply(sizes)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_Gradient_Reference)->Apply(sizes)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Gradient_OpenMP)->Apply(sizes)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_Curvature_Reference)->Apply(small_sizes)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Curvature_OpenMP)->Apply(small_sizes)->Unit(benchmark::kMicrosecond)->UseRealTime();

BENCHMARK_MAIN();
