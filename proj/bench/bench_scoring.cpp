// Serial reference kernel against the OpenMP kernel on one node of a
// 48-node, two-condition, eight-time dataset with an inhibited target.
//
//   ./build/bench/cdbn_bench --benchmark_counters_tabular=true

#include <benchmark/benchmark.h>

#include <random>

#include "cdbn/design.hpp"
#include "cdbn/inference.hpp"

namespace {

using namespace cdbn;

TimeCourseDataset dataset(std::size_t p) {
  std::mt19937_64 gen(48);
  std::normal_distribution<double> z;
  std::vector<std::string> names;
  for (std::size_t k = 0; k < p; ++k) names.push_back("P" + std::to_string(k));
  std::vector<double> values(p * 2 * 8);
  for (double& v : values) v = z(gen);
  return TimeCourseDataset(names, {"DMSO", "EGFRi"}, {0, 1, 2, 3, 4, 5, 6, 7}, values);
}

struct Fixture {
  TimeCourseDataset data = dataset(48);
  InterventionDesign design{{{"DMSO", {}}, {"EGFRi", {"P0"}}},
                            {InterventionKind::PerfectFixedEffect, InterventionDirection::Out}};
  ResolvedDesign resolved{design, data};
  DesignBuilder builder{data, resolved};
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

template <bool Parallel>
void BM_ScoreNode(benchmark::State& state) {
  const auto& f = fixture();
  InferenceSettings settings;
  settings.max_indegree = static_cast<std::size_t>(state.range(0));
  const auto sets = enumerate_parent_sets(48, settings.max_indegree);
  for (auto _ : state) {
    auto out = Parallel ? kernels::score_models_parallel(f.builder, 5, sets, settings)
                        : kernels::score_models_serial(f.builder, 5, sets, settings);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["models"] = static_cast<double>(sets.size());
  state.counters["models/s"] =
      benchmark::Counter(static_cast<double>(sets.size() * state.iterations()), benchmark::Counter::kIsRate);
}

}  // namespace

BENCHMARK(BM_ScoreNode<false>)->Name("score_node/serial")->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreNode<true>)->Name("score_node/parallel")->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
