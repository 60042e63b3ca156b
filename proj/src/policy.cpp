#include "vts/policy.hpp"

#include <algorithm>

namespace vts {

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::AssignmentSampling: return "assignment_sampling";
    case EstimatorKind::ProportionSampling: return "proportion_sampling";
    case EstimatorKind::ProportionMean: return "proportion_mean";
    case EstimatorKind::FullDraw: return "full_draw";
  }
  return "unknown";
}

EstimatorKind parse_estimator(const std::string& name) {
  if (name == "assignment_sampling") return EstimatorKind::AssignmentSampling;
  if (name == "proportion_sampling") return EstimatorKind::ProportionSampling;
  if (name == "proportion_mean") return EstimatorKind::ProportionMean;
  if (name == "full_draw") return EstimatorKind::FullDraw;
  throw ConfigError("unknown estimator \"" + name +
                    "\" (expected assignment_sampling, proportion_sampling, proportion_mean "
                    "or full_draw)");
}

std::string to_string(RegressorSource source) {
  return source == RegressorSource::Sampled ? "sampled" : "posterior_mean";
}

RegressorSource parse_regressor_source(const std::string& name) {
  if (name == "sampled") return RegressorSource::Sampled;
  if (name == "posterior_mean") return RegressorSource::PosteriorMean;
  throw ConfigError("unknown regressor source \"" + name +
                    "\" (expected sampled or posterior_mean)");
}

namespace {

std::vector<double> concentrations(const ArmState& arm) {
  std::vector<double> g;
  g.reserve(arm.components.size());
  for (const auto& c : arm.components) g.push_back(c.concentration);
  return g;
}

void check_context(const Vector& x, const ArmState& arm) {
  if (arm.components.empty() || x.size() != arm.components.front().mean.size()) {
    throw ConfigError("context dimension does not match the variational state");
  }
}

}  // namespace

ThetaDraw sample_theta(const VariationalState& state, std::size_t arm, RngStream& rng,
                       bool draw_assignment) {
  const auto& a = state.arms.at(arm);
  const auto gamma = concentrations(a);
  ThetaDraw draw;
  draw.pi = sample_dirichlet(gamma, rng);
  if (draw_assignment) draw.z = sample_categorical(gamma, rng);
  draw.components.reserve(a.components.size());
  for (const auto& c : a.components) {
    auto nig = sample_normal_inverse_gamma(c.mean, PDMatrix(c.scale), c.shape, c.rate, rng);
    draw.components.push_back({std::move(nig.w), nig.sigma2});
  }
  return draw;
}

double posterior_mean_reward(const Vector& x, const VariationalState& state, std::size_t arm) {
  const auto& a = state.arms.at(arm);
  check_context(x, a);
  const double total = a.total_concentration();
  double mu = 0.0;
  for (const auto& c : a.components) mu += (c.concentration / total) * x.dot(c.mean);
  return mu;
}

double expected_reward(const Vector& x, const VariationalState& state, std::size_t arm,
                       EstimatorKind kind, RngStream& rng) {
  const auto& a = state.arms.at(arm);
  check_context(x, a);
  if (a.components.size() == 1 && kind != EstimatorKind::FullDraw) {
    return x.dot(a.components.front().mean);
  }
  switch (kind) {
    case EstimatorKind::AssignmentSampling: {
      const std::size_t z = sample_categorical(concentrations(a), rng);
      return x.dot(a.components[z].mean);
    }
    case EstimatorKind::ProportionSampling: {
      const auto pi = sample_dirichlet(concentrations(a), rng);
      double mu = 0.0;
      for (std::size_t k = 0; k < pi.size(); ++k) mu += pi[k] * x.dot(a.components[k].mean);
      return mu;
    }
    case EstimatorKind::ProportionMean:
      return posterior_mean_reward(x, state, arm);
    case EstimatorKind::FullDraw: {
      const auto draw = sample_theta(state, arm, rng, false);
      return expected_reward_from_draw(x, draw, a, kind);
    }
  }
  return 0.0;
}

double expected_reward_from_draw(const Vector& x, const ThetaDraw& draw, const ArmState& arm,
                                 EstimatorKind kind) {
  check_context(x, arm);
  const auto& comps = draw.components;
  switch (kind) {
    case EstimatorKind::AssignmentSampling: {
      const std::size_t z = draw.z.value_or(0);
      return x.dot(comps.at(z).w);
    }
    case EstimatorKind::ProportionSampling:
    case EstimatorKind::FullDraw: {
      double mu = 0.0;
      for (std::size_t k = 0; k < comps.size(); ++k) mu += draw.pi[k] * x.dot(comps[k].w);
      return mu;
    }
    case EstimatorKind::ProportionMean: {
      const double total = arm.total_concentration();
      double mu = 0.0;
      for (std::size_t k = 0; k < comps.size(); ++k) {
        mu += (arm.components[k].concentration / total) * x.dot(comps[k].w);
      }
      return mu;
    }
  }
  return 0.0;
}

ArmSelection select_arm_with(std::size_t num_arms,
                             const std::function<double(std::size_t)>& estimate,
                             RngStream& rng) {
  if (num_arms == 0) throw ConfigError("select_arm: no arms");
  ArmSelection out;
  out.estimates.reserve(num_arms);
  for (std::size_t a = 0; a < num_arms; ++a) out.estimates.push_back(estimate(a));
  const double best = *std::max_element(out.estimates.begin(), out.estimates.end());
  std::vector<std::size_t> ties;
  for (std::size_t a = 0; a < num_arms; ++a) {
    if (out.estimates[a] == best) ties.push_back(a);
  }
  if (ties.empty()) {
    // only possible when every estimate is NaN
    throw NumericalError("select_arm: no finite arm estimate");
  }
  out.arm = ties.size() == 1 ? ties.front() : ties[rng.index(ties.size())];
  return out;
}

ArmSelection select_arm(const Vector& x, const VariationalState& state, EstimatorKind kind,
                        RngStream& rng, RegressorSource source) {
  return select_arm_with(
      state.num_arms(),
      [&](std::size_t a) {
        if (source == RegressorSource::PosteriorMean) {
          return expected_reward(x, state, a, kind, rng);
        }
        const auto draw =
            sample_theta(state, a, rng, kind == EstimatorKind::AssignmentSampling);
        return expected_reward_from_draw(x, draw, state.arms[a], kind);
      },
      rng);
}

OracleChoice oracle_best_arm(const Vector& x, const MixtureBanditModel& truth) {
  OracleChoice best{0, true_expected_reward(truth, 0, x)};
  for (std::size_t a = 1; a < truth.num_arms(); ++a) {
    const double mu = true_expected_reward(truth, a, x);
    if (mu > best.mu_star) best = {a, mu};
  }
  return best;
}

}  // namespace vts
