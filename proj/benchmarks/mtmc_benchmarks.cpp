#include <random>

#include <benchmark/benchmark.h>

#include "mtmc/assignment.hpp"
#include "mtmc/association_graph.hpp"
#include "mtmc/clustering.hpp"
#include "mtmc/gcn.hpp"
#include "mtmc/loss.hpp"
#include "mtmc/synthetic.hpp"

namespace {

using namespace mtmc;

TrajectorySet scenario(int identities, int dim) {
  SynthConfig s;
  s.identities = identities;
  s.dim = dim;
  s.inter_class_min_sep = 0.8;
  s.seed = 1;
  return generate_scenario(s);
}

void BM_BuildGraph(benchmark::State& state) {
  const auto data = scenario(static_cast<int>(state.range(0)), 64);
  for (auto _ : state) benchmark::DoNotOptimize(build_graph(data));
  state.counters["edges"] = static_cast<double>(build_graph(data).edge_count());
}
BENCHMARK(BM_BuildGraph)->Arg(32)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Forward(benchmark::State& state) {
  const auto data = scenario(static_cast<int>(state.range(0)), 64);
  const auto graph = build_graph(data);
  ModelConfig c;
  c.dim = 64;
  const auto params = init_parameters(c, 1);
  for (auto _ : state) benchmark::DoNotOptimize(forward(graph, params));
}
BENCHMARK(BM_Forward)->Arg(32)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State& state) {
  const auto data = scenario(static_cast<int>(state.range(0)), 64);
  const auto graph = build_graph(data);
  ModelConfig c;
  c.dim = 64;
  const auto params = init_parameters(c, 1);
  for (auto _ : state) {
    const auto trace = forward(graph, params);
    const auto loss = total_loss_from_logits(trace.logits, *graph.labels);
    benchmark::DoNotOptimize(backward(graph, params, trace, {loss.grad_probabilities, loss.grad_logits, {}}));
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(32)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Assignment(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int64_t> w(0, 1000);
  std::vector<std::vector<std::int64_t>> m(n, std::vector<std::int64_t>(n));
  for (auto& row : m)
    for (auto& v : row) v = w(rng);
  for (auto _ : state) benchmark::DoNotOptimize(max_weight_assignment(m));
}
BENCHMARK(BM_Assignment)->Arg(32)->Arg(145)->Arg(500)->Unit(benchmark::kMicrosecond);

void BM_RefineClusters(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> cam(1, 4);
  std::uniform_real_distribution<double> p(0.5, 1.0);
  std::bernoulli_distribution coin(0.05);
  std::vector<int> cams(n);
  for (auto& c : cams) c = cam(rng);
  std::vector<EdgeEndpoints> edges;
  std::vector<double> probs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (cams[i] != cams[j] && coin(rng)) {
        edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
        probs.push_back(p(rng));
      }
  const auto cs = connected_components(n, edges, probs);
  for (auto _ : state) benchmark::DoNotOptimize(refine_clusters(cs, cams, 4));
}
BENCHMARK(BM_RefineClusters)->Arg(100)->Arg(400)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
