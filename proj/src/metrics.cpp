#include "vts/metrics.hpp"

#include <cmath>
#include <string>

namespace vts {

void RealizationTrace::record(Vector context, std::size_t arm, double reward, double mu_star_t,
                              std::span<const double> estimated, std::span<const double> truth) {
  if (estimated.size() != num_arms || truth.size() != num_arms) {
    throw AggregationError("RealizationTrace::record: expected " + std::to_string(num_arms) +
                           " per-arm means");
  }
  contexts.push_back(std::move(context));
  arms.push_back(arm);
  rewards.push_back(reward);
  mu_star.push_back(mu_star_t);
  estimated_means.insert(estimated_means.end(), estimated.begin(), estimated.end());
  true_means.insert(true_means.end(), truth.begin(), truth.end());
}

void RealizationTrace::validate() const {
  const std::size_t T = rewards.size();
  if (contexts.size() != T || arms.size() != T || mu_star.size() != T ||
      estimated_means.size() != T * num_arms || true_means.size() != T * num_arms) {
    throw AggregationError("RealizationTrace: per-step vectors have inconsistent lengths");
  }
}

std::vector<double> cumulative_regret(const RealizationTrace& trace) {
  trace.validate();
  std::vector<double> out(trace.length());
  double acc = 0.0;
  for (std::size_t t = 0; t < trace.length(); ++t) {
    acc += trace.mu_star[t] - trace.rewards[t];
    out[t] = acc;
  }
  return out;
}

std::vector<double> expected_reward_mse(const RealizationTrace& trace) {
  trace.validate();
  std::vector<double> mse(trace.num_arms, 0.0);
  const std::size_t T = trace.length();
  if (T == 0) return mse;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t a = 0; a < trace.num_arms; ++a) {
      const double e = trace.true_means[t * trace.num_arms + a] -
                       trace.estimated_means[t * trace.num_arms + a];
      mse[a] += e * e;
    }
  }
  for (double& m : mse) m /= static_cast<double>(T);
  return mse;
}

RealizationSummary summarize(const RealizationTrace& trace) {
  return {cumulative_regret(trace), expected_reward_mse(trace)};
}

namespace {

// Two-pass mean and population standard deviation, shifted by the first value so that
// identical inputs give exactly that value and a zero deviation.
template <class Get>
void column_stats(std::size_t n, Get get, double& mean, double& sd) {
  const double shift = get(0);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += get(i) - shift;
  const double m = s / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (get(i) - shift) - m;
    ss += d * d;
  }
  mean = shift + m;
  sd = std::sqrt(ss / static_cast<double>(n));
}

}  // namespace

AggregateResult aggregate(std::span<const RealizationSummary> summaries) {
  if (summaries.empty()) throw AggregationError("aggregate: no realizations");
  const std::size_t T = summaries.front().cumulative_regret.size();
  const std::size_t A = summaries.front().mse.size();
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    if (summaries[i].cumulative_regret.size() != T || summaries[i].mse.size() != A) {
      throw AggregationError("aggregate: realization " + std::to_string(i) + " has length " +
                             std::to_string(summaries[i].cumulative_regret.size()) +
                             ", expected " + std::to_string(T));
    }
  }
  const std::size_t n = summaries.size();
  AggregateResult out;
  out.realizations = n;
  out.regret_mean.resize(T);
  out.regret_std.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    column_stats(
        n, [&](std::size_t i) { return summaries[i].cumulative_regret[t]; }, out.regret_mean[t],
        out.regret_std[t]);
  }
  out.mse_mean.resize(A);
  out.mse_std.resize(A);
  for (std::size_t a = 0; a < A; ++a) {
    column_stats(
        n, [&](std::size_t i) { return summaries[i].mse[a]; }, out.mse_mean[a], out.mse_std[a]);
  }
  return out;
}

AggregateResult aggregate(std::span<const RealizationTrace> traces) {
  std::vector<RealizationSummary> summaries;
  summaries.reserve(traces.size());
  for (const auto& t : traces) summaries.push_back(summarize(t));
  return aggregate(summaries);
}

}  // namespace vts
