#include "vts/experiment.hpp"

#include <exception>
#include <optional>

#include <omp.h>

#include "vts/inference.hpp"
#include "vts/policy.hpp"

namespace vts {

std::uint64_t realization_seed(std::uint64_t master_seed, std::size_t realization,
                               std::size_t k_index) {
  return derive_seed(master_seed, realization, k_index);
}

RealizationTrace run_realization(const ExperimentConfig& config, std::size_t k_index,
                                 std::size_t realization, RealizationStats* stats) {
  const std::size_t K = config.components.at(k_index);
  const BanditConfig bandit = config.bandit_config(K);
  const PriorHyperparams priors = config.resolved_priors(K);
  const std::uint64_t seed = realization_seed(config.master_seed, realization, k_index);

  RngStream context_rng = config.shared_context
                              ? RngStream(config.master_seed, kSharedContextStream)
                              : RngStream(seed, kContextStream);
  RngStream policy_rng(seed, kPolicyStream);
  RngStream reward_rng(seed, kRewardStream);
  RngStream jitter_rng(seed, kJitterStream);

  ContextGenerator contexts = config.context;
  contexts.rewind();
  VariationalState state = init_state(bandit, priors);
  InteractionHistory history(bandit.num_arms, bandit.context_dim);
  RealizationTrace trace(bandit.num_arms);

  InferenceOptions inference;
  inference.settings = config.convergence;
  inference.mode = KernelMode::Serial;
  inference.jitter_rng = &jitter_rng;

  std::vector<double> estimated(bandit.num_arms);
  std::vector<double> truth(bandit.num_arms);
  for (std::size_t t = 0; t < config.horizon; ++t) {
    Vector x = contexts.draw(context_rng);
    const auto choice =
        select_arm(x, state, config.estimator, policy_rng, config.regressor_source);
    for (std::size_t a = 0; a < bandit.num_arms; ++a) {
      estimated[a] = posterior_mean_reward(x, state, a);
      truth[a] = true_expected_reward(config.model, a, x);
    }
    const auto oracle = oracle_best_arm(x, config.model);
    const double y = draw_reward(config.model, choice.arm, x, reward_rng);
    history.append(x, choice.arm, y);
    trace.record(std::move(x), choice.arm, y, oracle.mu_star, estimated, truth);

    if ((t + 1) % config.update_every == 0) {
      auto result = run_inference(history, state, priors, inference);
      state = std::move(result.state);
      if (stats) {
        ++stats->inference_calls;
        stats->sweeps += result.iterations;
        stats->unconverged_calls += result.converged ? 0 : 1;
        stats->rate_clamps += result.rate_clamps;
        stats->invariant_checks += result.invariant_checks;
      }
    }
  }
  return trace;
}

namespace {

struct Outcome {
  std::optional<RealizationSummary> summary;
  RealizationStats stats;
  std::string numerical_error;
  std::exception_ptr fatal;
};

Outcome run_one(const ExperimentConfig& config, std::size_t k_index, std::size_t realization) {
  Outcome out;
  try {
    out.summary = summarize(run_realization(config, k_index, realization, &out.stats));
  } catch (const NumericalError& e) {
    out.numerical_error = e.what();
  } catch (const LinearAlgebraError& e) {
    out.numerical_error = e.what();
  } catch (const DomainError& e) {
    out.numerical_error = e.what();
  } catch (...) {
    out.fatal = std::current_exception();
  }
  return out;
}

void add(RealizationStats& into, const RealizationStats& s) {
  into.inference_calls += s.inference_calls;
  into.sweeps += s.sweeps;
  into.unconverged_calls += s.unconverged_calls;
  into.rate_clamps += s.rate_clamps;
  into.invariant_checks += s.invariant_checks;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  ExperimentResult result;
  const std::size_t n = config.realizations;

  for (std::size_t ki = 0; ki < config.components.size(); ++ki) {
    std::vector<Outcome> outcomes(n);
    if (options.execution == Execution::Serial) {
      for (std::size_t r = 0; r < n; ++r) outcomes[r] = run_one(config, ki, r);
    } else {
      const int workers = static_cast<int>(std::max<std::size_t>(options.workers, 1));
      const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
      for (std::ptrdiff_t r = 0; r < count; ++r) {
        outcomes[static_cast<std::size_t>(r)] = run_one(config, ki, static_cast<std::size_t>(r));
      }
    }

    SweepResult sweep;
    sweep.components = config.components[ki];
    std::vector<RealizationSummary> summaries;
    summaries.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
      auto& o = outcomes[r];
      if (o.fatal) std::rethrow_exception(o.fatal);
      const std::uint64_t seed = realization_seed(config.master_seed, r, ki);
      sweep.seeds.push_back(seed);
      add(sweep.totals, o.stats);
      if (o.summary) {
        summaries.push_back(std::move(*o.summary));
      } else {
        sweep.failures.push_back({r, seed, o.numerical_error});
      }
    }
    // more than 1% of N failing aborts the experiment
    if (sweep.failures.size() * 100 > n) {
      std::string msg = "K=" + std::to_string(sweep.components) + ": " +
                        std::to_string(sweep.failures.size()) + " of " + std::to_string(n) +
                        " realizations failed; first: realization " +
                        std::to_string(sweep.failures.front().realization) + " (seed " +
                        std::to_string(sweep.failures.front().seed) +
                        "): " + sweep.failures.front().error;
      throw ExperimentFailure(msg);
    }
    sweep.aggregate = aggregate(summaries);
    result.sweeps.push_back(std::move(sweep));
  }
  return result;
}

}  // namespace vts
