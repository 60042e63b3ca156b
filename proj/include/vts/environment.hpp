#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "vts/numerics.hpp"

namespace vts {

// Ground-truth reward model: each arm is a mixture of linear-Gaussian components.
struct ArmMixture {
  std::vector<double> weights;
  std::vector<Vector> regressors;
  std::vector<double> variances;

  bool operator==(const ArmMixture& o) const;
};

struct MixtureBanditModel {
  std::vector<ArmMixture> arms;

  std::size_t num_arms() const { return arms.size(); }
  std::size_t context_dim() const;
  void validate() const;

  bool operator==(const MixtureBanditModel&) const = default;
};

MixtureBanditModel scenario_a();
MixtureBanditModel scenario_b();

class ContextGenerator {
 public:
  enum class Kind { UniformIid, FixedSequence };

  static ContextGenerator uniform(std::size_t dim, double low = 0.0, double high = 1.0);
  static ContextGenerator uniform(Vector low, Vector high);
  static ContextGenerator fixed_sequence(std::vector<Vector> sequence);

  Kind kind() const { return kind_; }
  std::size_t dim() const;
  const Vector& low() const { return low_; }
  const Vector& high() const { return high_; }
  const std::vector<Vector>& sequence() const { return sequence_; }
  std::size_t position() const { return cursor_; }
  void rewind() { cursor_ = 0; }

  // Uniform: independent U(low_i, high_i) per coordinate. Fixed: next stored vector,
  // SequenceError once exhausted.
  Vector draw(RngStream& rng);

  bool operator==(const ContextGenerator& o) const;

 private:
  ContextGenerator() = default;

  Kind kind_ = Kind::UniformIid;
  Vector low_;
  Vector high_;
  std::vector<Vector> sequence_;
  std::size_t cursor_ = 0;
};

Vector draw_context(ContextGenerator& gen, RngStream& rng);

double true_expected_reward(const MixtureBanditModel& model, std::size_t arm, const Vector& x);
double draw_reward(const MixtureBanditModel& model, std::size_t arm, const Vector& x,
                   RngStream& rng);

// JSON: {"scenario": "A" | "B"} or {"scenario": "custom", "arms": [{"weights", "regressors",
// "variances"}]}.
MixtureBanditModel model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const MixtureBanditModel& model);

nlohmann::json context_to_json(const ContextGenerator& gen);
// {"kind": "uniform_iid", "low": [...], "high": [...]} (bounds may be scalars) or
// {"kind": "fixed_sequence", "sequence": [[...], ...]}.
ContextGenerator context_from_json(const nlohmann::json& j, std::size_t dim);

}  // namespace vts
