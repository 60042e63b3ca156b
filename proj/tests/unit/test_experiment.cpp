#include <doctest.h>

#include "vts/experiment.hpp"

using namespace vts;
using nlohmann::json;

namespace {

ExperimentConfig small(const std::string& scenario, std::size_t T, std::size_t N) {
  auto c = parse_config(json{{"scenario", scenario}});
  c.horizon = T;
  c.realizations = N;
  c.master_seed = 77;
  return c;
}

}  // namespace

TEST_CASE("serial reference and OpenMP runs are identical for any worker count") {
  const auto cfg = small("B", 40, 12);
  const auto ref = run_experiment(cfg, {Execution::Serial, 1});
  for (std::size_t workers : {1u, 2u, 5u}) {
    CAPTURE(workers);
    const auto par = run_experiment(cfg, {Execution::Parallel, workers});
    REQUIRE(par.sweeps.size() == ref.sweeps.size());
    for (std::size_t i = 0; i < ref.sweeps.size(); ++i) {
      CHECK(par.sweeps[i].aggregate == ref.sweeps[i].aggregate);
      CHECK(par.sweeps[i].seeds == ref.sweeps[i].seeds);
      CHECK(par.sweeps[i].totals.sweeps == ref.sweeps[i].totals.sweeps);
    }
  }
}

TEST_CASE("a one-step horizon runs") {
  const auto res = run_experiment(small("A", 1, 3));
  REQUIRE(res.sweeps.size() == 3);
  for (const auto& s : res.sweeps) {
    CHECK(s.aggregate.horizon() == 1);
    CHECK(s.aggregate.realizations == 3);
    CHECK(s.failures.empty());
    CHECK(s.totals.inference_calls == 3);
  }
}

TEST_CASE("seeds differ across realizations and K") {
  const auto cfg = small("B", 5, 4);
  const auto res = run_experiment(cfg);
  CHECK(res.sweeps[0].seeds != res.sweeps[1].seeds);
  CHECK(res.sweeps[0].seeds[0] != res.sweeps[0].seeds[1]);
  CHECK(res.sweeps[2].seeds[3] == realization_seed(77, 3, 2));
}

TEST_CASE("realizations are reproducible and record the estimate before the update") {
  auto cfg = small("B", 30, 1);
  cfg.components = {2};
  const auto a = run_realization(cfg, 0, 0);
  const auto b = run_realization(cfg, 0, 0);
  CHECK(a.arms == b.arms);
  CHECK(a.rewards == b.rewards);
  // nothing has been observed at the first step, so the estimate is the prior mean
  CHECK(a.estimated_means[0] == 0.0);
  CHECK(a.estimated_means[1] == 0.0);
  CHECK(a.true_means[1] == doctest::Approx(2.1 * (a.contexts[0](0) + a.contexts[0](1))));
}

TEST_CASE("shared contexts replay one sequence across realizations") {
  auto cfg = small("A", 20, 2);
  cfg.components = {1};
  cfg.shared_context = true;
  const auto a = run_realization(cfg, 0, 0);
  const auto b = run_realization(cfg, 0, 1);
  for (std::size_t t = 0; t < 20; ++t) CHECK(same_values(a.contexts[t], b.contexts[t]));
  cfg.shared_context = false;
  const auto c = run_realization(cfg, 0, 1);
  CHECK_FALSE(same_values(a.contexts[0], c.contexts[0]));
}

TEST_CASE("fixed context sequences drive the loop") {
  auto cfg = small("A", 3, 2);
  cfg.components = {1};
  Vector x(2);
  x << 0.25, 0.75;
  cfg.context = ContextGenerator::fixed_sequence({x, x, x});
  const auto tr = run_realization(cfg, 0, 1);
  for (const auto& c : tr.contexts) CHECK(same_values(c, x));
}

TEST_CASE("batched updates run inference every update_every steps") {
  auto cfg = small("B", 30, 2);
  cfg.update_every = 7;
  RealizationStats stats;
  run_realization(cfg, 1, 0, &stats);
  CHECK(stats.inference_calls == 4);
}

TEST_CASE("a converged policy plays the better arm of scenario A") {
  auto cfg = small("A", 300, 4);
  cfg.components = {2};
  std::size_t good = 0, total = 0;
  for (std::size_t r = 0; r < cfg.realizations; ++r) {
    const auto tr = run_realization(cfg, 0, r);
    for (std::size_t t = 200; t < 300; ++t, ++total) good += tr.arms[t] == 1 ? 1 : 0;
  }
  CHECK(static_cast<double>(good) / static_cast<double>(total) > 0.95);
}

TEST_CASE("numerical breakdown in most realizations aborts the experiment") {
  auto cfg = parse_config(json::parse(R"({"scenario": "custom", "arms": [
      {"weights": [1.0], "regressors": [[1e160, 1e160]], "variances": [1]},
      {"weights": [1.0], "regressors": [[1e160, 1e160]], "variances": [1]}]})"));
  cfg.horizon = 3;
  cfg.realizations = 4;
  cfg.components = {1};
  CHECK_THROWS_AS(run_experiment(cfg), ExperimentFailure);
}

TEST_CASE("invariant checks run inside the loop when enabled") {
  auto cfg = small("B", 25, 1);
  cfg.convergence.check_invariants = true;
  RealizationStats stats;
  run_realization(cfg, 2, 0, &stats);
  CHECK(stats.invariant_checks == stats.sweeps);
  CHECK(stats.sweeps >= stats.inference_calls);
}
