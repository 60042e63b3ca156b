#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vts/environment.hpp"
#include "vts/model.hpp"

namespace vts {

// How the per-arm expected reward treats the mixture weights.
enum class EstimatorKind {
  AssignmentSampling,  // x^T u_z, z ~ Cat(gamma / sum gamma)
  ProportionSampling,  // sum_k pi_k x^T u_k, pi ~ Dir(gamma)
  ProportionMean,      // sum_k (gamma_k / sum gamma) x^T u_k
  FullDraw,            // sum_k pi_k x^T w_k with (pi, w) from a complete posterior draw
};

std::string to_string(EstimatorKind kind);
// "assignment_sampling" | "proportion_sampling" | "proportion_mean" | "full_draw"
EstimatorKind parse_estimator(const std::string& name);

// Which regression vectors enter the estimator when selecting an arm.
enum class RegressorSource {
  Sampled,        // w_k drawn from q(w, sigma2) for every arm on every step
  PosteriorMean,  // the variational means u~_k themselves
};

std::string to_string(RegressorSource source);
RegressorSource parse_regressor_source(const std::string& name);

struct ComponentDraw {
  Vector w;
  double sigma2 = 0.0;
};

struct ThetaDraw {
  std::vector<double> pi;
  std::vector<ComponentDraw> components;
  std::optional<std::size_t> z;
};

// Draw order: pi ~ Dir(gamma~) (skipped for one component), z ~ Cat(gamma~ / sum) when
// requested (skipped for one component), then (w_k, sigma2_k) ~ NIG for each k in order.
ThetaDraw sample_theta(const VariationalState& state, std::size_t arm, RngStream& rng,
                       bool draw_assignment = true);

// Estimator evaluated at the variational means. ProportionMean never touches rng.
double expected_reward(const Vector& x, const VariationalState& state, std::size_t arm,
                       EstimatorKind kind, RngStream& rng);
// ProportionMean point estimate.
double posterior_mean_reward(const Vector& x, const VariationalState& state, std::size_t arm);

// Estimator evaluated with the regressors of a posterior draw in place of the means.
double expected_reward_from_draw(const Vector& x, const ThetaDraw& draw, const ArmState& arm,
                                 EstimatorKind kind);

struct ArmSelection {
  std::size_t arm = 0;
  std::vector<double> estimates;
};

ArmSelection select_arm(const Vector& x, const VariationalState& state, EstimatorKind kind,
                        RngStream& rng, RegressorSource source = RegressorSource::Sampled);

// Argmax over `estimate(a)` for a in [0, num_arms); exact ties are broken uniformly with
// rng (no draw is consumed without a tie).
ArmSelection select_arm_with(std::size_t num_arms,
                             const std::function<double(std::size_t)>& estimate,
                             RngStream& rng);

struct OracleChoice {
  std::size_t arm = 0;
  double mu_star = 0.0;
};

// Exact argmax of the true mixture means; ties go to the lowest index.
OracleChoice oracle_best_arm(const Vector& x, const MixtureBanditModel& truth);

}  // namespace vts
