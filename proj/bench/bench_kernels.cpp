#include <benchmark/benchmark.h>

#include <omp.h>

#include "vts/experiment.hpp"
#include "vts/inference.hpp"

using namespace vts;

namespace {

struct Fixture {
  InteractionHistory history{1, 2};
  VariationalState state;

  Fixture(std::size_t rows, std::size_t K) {
    const auto model = scenario_b();
    RngStream rng(42, 0);
    for (std::size_t t = 0; t < rows; ++t) {
      Vector x(2);
      x << rng.uniform(), rng.uniform();
      history.append(x, 0, draw_reward(model, 1, x, rng));
    }
    const auto cfg = BanditConfig::uniform(1, 2, K);
    const auto priors = PriorHyperparams::defaults(cfg);
    RngStream jitter(42, 3);
    InferenceOptions opt;
    opt.jitter_rng = &jitter;
    opt.settings.max_iterations = 3;
    state = run_inference(history, init_state(cfg, priors), priors, opt).state;
  }
};

void responsibilities(benchmark::State& st, KernelMode mode) {
  const Fixture f(static_cast<std::size_t>(st.range(0)), static_cast<std::size_t>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(compute_responsibilities(f.history, f.state, 0, mode));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_ResponsibilitiesSerial(benchmark::State& st) { responsibilities(st, KernelMode::Serial); }
void BM_ResponsibilitiesParallel(benchmark::State& st) { responsibilities(st, KernelMode::Parallel); }

ExperimentConfig small_experiment() {
  auto c = parse_config(nlohmann::json{{"scenario", "B"}, {"components", {2}}});
  c.horizon = 100;
  c.realizations = 16;
  return c;
}

void BM_ExperimentSerial(benchmark::State& st) {
  const auto cfg = small_experiment();
  for (auto _ : st) benchmark::DoNotOptimize(run_experiment(cfg, {Execution::Serial, 1}));
}

void BM_ExperimentParallel(benchmark::State& st) {
  const auto cfg = small_experiment();
  const auto workers = static_cast<std::size_t>(omp_get_max_threads());
  for (auto _ : st) benchmark::DoNotOptimize(run_experiment(cfg, {Execution::Parallel, workers}));
}

}  // namespace

BENCHMARK(BM_ResponsibilitiesSerial)->ArgsProduct({{512, 4096, 32768}, {2, 3}});
BENCHMARK(BM_ResponsibilitiesParallel)->ArgsProduct({{512, 4096, 32768}, {2, 3}});
BENCHMARK(BM_ExperimentSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExperimentParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
