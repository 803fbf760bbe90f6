// Serial reference kernels vs. their OpenMP counterparts on one synchronous round.
#include <benchmark/benchmark.h>

#include "dsproj/geometry.hpp"
#include "dsproj/kernels.hpp"
#include "dsproj/network.hpp"
#include "dsproj/rng.hpp"

using namespace dsproj;

namespace {

struct Fixture {
  GossipMatrix q;
  SetFamily family;
  Stacked a, b, c, out, scratch1, scratch2;

  Fixture(int nodes, int dim)
      : q(metropolis_weights(Graph::complete(nodes))), family(make_family(nodes, dim)), a(nodes, dim), b(nodes, dim),
        c(nodes, dim), out(nodes, dim), scratch1(nodes, dim), scratch2(nodes, dim) {
    NodeRng rng(1, 0);
    for (auto* s : {&a, &b, &c})
      for (Eigen::Index i = 0; i < s->flat().size(); ++i) s->flat()[i] = rng.gaussian();
  }

  // Balls that all contain the origin.
  static SetFamily make_family(int nodes, int dim) {
    NodeRng rng(2, 0);
    std::vector<ConvexSet> sets;
    for (int i = 0; i < nodes; ++i) {
      Vec center(dim);
      for (int d = 0; d < dim; ++d) center[d] = rng.gaussian();
      sets.push_back(ConvexSet::ball(center, center.norm() + 1.0));
    }
    return SetFamily(std::move(sets), Vec::Zero(dim));
  }
};

Exec exec_of(const benchmark::State& state) { return state.range(2) ? Exec::parallel : Exec::serial; }

void BM_Mix(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    kernels::mix(f.q, f.a, f.out, exec_of(state));
    benchmark::DoNotOptimize(f.out.flat().data());
  }
}

void BM_GdFast(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    kernels::gd_fast_update(f.family, f.q, f.a, f.b, 0.1, f.out, exec_of(state));
    benchmark::DoNotOptimize(f.out.flat().data());
  }
}

void BM_BdhFast(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    kernels::bdh_fast_update(f.family, f.q, f.a, f.b, f.out, f.scratch1, f.scratch2, exec_of(state));
    benchmark::DoNotOptimize(f.out.flat().data());
  }
}

void BM_Slow(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    kernels::slow_update(f.q, f.a, f.b, f.c, 0.01, f.out, exec_of(state));
    benchmark::DoNotOptimize(f.out.flat().data());
  }
}

// Args: nodes, dimension, parallel (0 = serial reference, 1 = OpenMP).
void sizes(benchmark::internal::Benchmark* b) {
  for (int nodes : {10, 100, 400})
    for (int dim : {10, 100})
      for (int par : {0, 1}) b->Args({nodes, dim, par});
  b->ArgNames({"nodes", "dim", "omp"});
}

}  // namespace

BENCHMARK(BM_Mix)->Apply(sizes);
BENCHMARK(BM_GdFast)->Apply(sizes);
BENCHMARK(BM_BdhFast)->Apply(sizes);
BENCHMARK(BM_Slow)->Apply(sizes);

BENCHMARK_MAIN();
