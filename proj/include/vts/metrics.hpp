#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vts/numerics.hpp"

namespace vts {

// Everything recorded for one realization of the bandit loop, one entry per step.
struct RealizationTrace {
  std::size_t num_arms = 0;
  std::vector<Vector> contexts;
  std::vector<std::size_t> arms;
  std::vector<double> rewards;
  std::vector<double> mu_star;
  std::vector<double> estimated_means;  // step-major, num_arms per step
  std::vector<double> true_means;       // step-major, num_arms per step

  explicit RealizationTrace(std::size_t num_arms = 0) : num_arms(num_arms) {}

  std::size_t length() const { return rewards.size(); }
  void record(Vector context, std::size_t arm, double reward, double mu_star,
              std::span<const double> estimated, std::span<const double> truth);
  void validate() const;
};

// Running sum of mu*_t - y_t.
std::vector<double> cumulative_regret(const RealizationTrace& trace);

// Per arm: mean over steps of (true mean - estimated mean)^2.
std::vector<double> expected_reward_mse(const RealizationTrace& trace);

// The reduced form of a trace that aggregation needs.
struct RealizationSummary {
  std::vector<double> cumulative_regret;
  std::vector<double> mse;

  bool operator==(const RealizationSummary&) const = default;
};

RealizationSummary summarize(const RealizationTrace& trace);

struct AggregateResult {
  std::size_t realizations = 0;
  std::vector<double> regret_mean;  // per step
  std::vector<double> regret_std;   // per step, population standard deviation
  std::vector<double> mse_mean;     // per arm
  std::vector<double> mse_std;      // per arm

  std::size_t horizon() const { return regret_mean.size(); }
  bool operator==(const AggregateResult&) const = default;
};

// Folds in index order, so the result does not depend on which worker produced which
// summary. Throws AggregationError on length mismatch or empty input.
AggregateResult aggregate(std::span<const RealizationSummary> summaries);
AggregateResult aggregate(std::span<const RealizationTrace> traces);

}  // namespace vts
