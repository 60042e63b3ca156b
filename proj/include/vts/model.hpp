#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "vts/numerics.hpp"

namespace vts {

struct BanditConfig {
  std::size_t num_arms = 0;
  std::size_t context_dim = 0;
  std::vector<std::size_t> components_per_arm;

  static BanditConfig uniform(std::size_t num_arms, std::size_t context_dim,
                              std::size_t components);

  std::size_t components(std::size_t arm) const { return components_per_arm.at(arm); }
  void validate() const;

  bool operator==(const BanditConfig&) const = default;
};

// Normal-Inverse-Gamma prior of one mixture component.
struct ComponentPrior {
  Vector mean;         // u0
  PDMatrix scale;      // V0
  Matrix precision;    // V0^-1, cached
  double shape = 1.0;  // alpha0
  double rate = 1.0;   // beta0

  ComponentPrior() = default;
  ComponentPrior(Vector mean, PDMatrix scale, double shape, double rate);

  bool operator==(const ComponentPrior& o) const;
};

struct ArmPrior {
  // Dirichlet concentration, one entry per component (a scalar gamma0 is broadcast).
  std::vector<double> concentration;
  std::vector<ComponentPrior> components;

  bool operator==(const ArmPrior&) const = default;
};

struct PriorHyperparams {
  std::vector<ArmPrior> arms;

  // Same hyperparameters for every arm and component.
  static PriorHyperparams broadcast(const BanditConfig& config, double gamma0, const Vector& u0,
                                    const PDMatrix& V0, double alpha0, double beta0);
  // gamma0 = 0.1, u0 = 0, V0 = I, alpha0 = beta0 = 1.
  static PriorHyperparams defaults(const BanditConfig& config);

  // Throws ConfigError on any shape mismatch or non-positive hyperparameter.
  void validate(const BanditConfig& config) const;

  bool operator==(const PriorHyperparams&) const = default;
};

struct ComponentState {
  double concentration = 0.0;  // gamma~
  Vector mean;                 // u~
  Matrix scale;                // V~
  Matrix precision;            // V~^-1
  double shape = 0.0;          // alpha~
  double rate = 0.0;           // beta~

  bool operator==(const ComponentState& o) const;
};

struct ArmState {
  std::vector<ComponentState> components;
  // Set once the symmetric initial responsibilities of this arm have been jittered.
  bool symmetry_broken = false;

  double total_concentration() const;
  bool operator==(const ArmState&) const = default;
};

struct VariationalState {
  std::vector<ArmState> arms;

  std::size_t num_arms() const { return arms.size(); }
  bool operator==(const VariationalState&) const = default;
};

// Responsibilities of one arm: one row per observation of the arm (in history order),
// one column per component, row-major.
struct ArmResponsibilities {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  ArmResponsibilities() = default;
  ArmResponsibilities(std::size_t rows, std::size_t cols)
      : rows(rows), cols(cols), values(rows * cols, 0.0) {}

  double& operator()(std::size_t t, std::size_t k) { return values[t * cols + k]; }
  double operator()(std::size_t t, std::size_t k) const { return values[t * cols + k]; }
  std::span<const double> row(std::size_t t) const { return {values.data() + t * cols, cols}; }
  double column_sum(std::size_t k) const;

  bool operator==(const ArmResponsibilities&) const = default;
};

struct Responsibilities {
  std::vector<ArmResponsibilities> arms;
};

// Append-only record of (context, arm, reward) triples. Keeps a per-arm index so that
// inference can walk one arm's observations without scanning the whole history.
class InteractionHistory {
 public:
  InteractionHistory(std::size_t num_arms, std::size_t context_dim);

  void append(const Vector& context, std::size_t arm, double reward);

  std::size_t size() const { return arms_.size(); }
  bool empty() const { return arms_.empty(); }
  std::size_t num_arms() const { return arm_steps_.size(); }
  std::size_t context_dim() const { return context_dim_; }

  // Row t of the context matrix.
  std::span<const double> context(std::size_t t) const {
    return {contexts_.data() + t * context_dim_, context_dim_};
  }
  std::size_t arm(std::size_t t) const { return arms_[t]; }
  double reward(std::size_t t) const { return rewards_[t]; }
  const std::vector<std::size_t>& steps_of(std::size_t arm) const { return arm_steps_.at(arm); }
  std::size_t count(std::size_t arm) const { return arm_steps_.at(arm).size(); }

 private:
  std::size_t context_dim_;
  std::vector<double> contexts_;
  std::vector<std::size_t> arms_;
  std::vector<double> rewards_;
  std::vector<std::vector<std::size_t>> arm_steps_;
};

VariationalState init_state(const BanditConfig& config, const PriorHyperparams& priors);

// Exact binary round trip (IEEE-754 bit patterns, little-endian).
std::vector<std::uint8_t> serialize(const VariationalState& state);
VariationalState deserialize_state(std::span<const std::uint8_t> bytes);

void to_json(nlohmann::json& j, const BanditConfig& config);
void from_json(const nlohmann::json& j, BanditConfig& config);

nlohmann::json priors_to_json(const PriorHyperparams& priors);
// Accepts either a shared block {gamma0, u0, V0, alpha0, beta0} (every field optional,
// defaults as in PriorHyperparams::defaults) or {"arms": [{"gamma0", "components": [...]}]}.
PriorHyperparams priors_from_json(const nlohmann::json& j, const BanditConfig& config);

Vector vector_from_json(const nlohmann::json& j);
Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json to_json_value(const Vector& v);
nlohmann::json to_json_value(const Matrix& m);

}  // namespace vts
