#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "vts/environment.hpp"
#include "vts/inference.hpp"
#include "vts/model.hpp"
#include "vts/policy.hpp"

namespace vts {

struct ExperimentConfig {
  std::string scenario = "B";  // "A", "B" or "custom"
  MixtureBanditModel model = scenario_b();
  ContextGenerator context = ContextGenerator::uniform(2);
  std::size_t horizon = 500;
  std::size_t realizations = 500;
  std::vector<std::size_t> components{1, 2, 3};  // assumed K per arm, one run per entry
  // Raw prior block; resolved per K with priors_from_json.
  nlohmann::json priors = nlohmann::json::object();
  EstimatorKind estimator = EstimatorKind::ProportionSampling;
  RegressorSource regressor_source = RegressorSource::Sampled;
  ConvergenceSettings convergence;
  std::uint64_t master_seed = 0;
  std::size_t update_every = 1;
  bool shared_context = false;
  std::string output_dir = "vts_out";

  BanditConfig bandit_config(std::size_t components_per_arm) const;
  PriorHyperparams resolved_priors(std::size_t components_per_arm) const;

  // Every problem found, in field order. Empty when the config is usable.
  std::vector<std::string> validation_errors() const;
  // Throws ConfigError listing every problem.
  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

// Parse errors and validation errors are collected and reported together.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& config);

// "desk": T=500, N=500. "paper": T=500, N=5000.
void apply_profile(ExperimentConfig& config, const std::string& profile);

// Built-in scenarios in the custom-model JSON layout.
nlohmann::json builtin_scenarios_json();

}  // namespace vts
