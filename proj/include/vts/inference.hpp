#pragma once

#include <cstddef>
#include <functional>

#include "vts/model.hpp"

namespace vts {

#ifdef NDEBUG
inline constexpr bool kCheckInvariantsByDefault = false;
#else
inline constexpr bool kCheckInvariantsByDefault = true;
#endif

struct ConvergenceSettings {
  double tolerance = 1e-6;
  std::size_t max_iterations = 100;
  // Assert row normalization and responsibility mass conservation after every sweep.
  bool check_invariants = kCheckInvariantsByDefault;

  void validate() const;
  bool operator==(const ConvergenceSettings&) const = default;
};

enum class KernelMode {
  Serial,    // reference implementation
  Parallel,  // OpenMP over rows once an arm has enough observations
};

// Rows at or above this count use the OpenMP responsibility kernel in Parallel mode.
inline constexpr std::size_t kParallelRowThreshold = 2048;

// Log-space responsibilities of `arm` given the current variational state, one row per
// observation of the arm. Rows are normalized with max subtraction before exponentiation.
ArmResponsibilities compute_responsibilities(const InteractionHistory& history,
                                             const VariationalState& state, std::size_t arm,
                                             KernelMode mode = KernelMode::Serial);

// Weighted sufficient statistics of one component: sum r, sum r x x^T, sum r x y, sum r y^2.
struct WeightedStats {
  double count = 0.0;
  Matrix xx;
  Vector xy;
  double yy = 0.0;
};

std::vector<WeightedStats> accumulate_stats(const InteractionHistory& history,
                                            const ArmResponsibilities& resp, std::size_t arm);

struct UpdateDiagnostics {
  std::size_t rate_clamps = 0;  // times beta~ was clamped to stay positive
};

// Conjugate mean-field update of every component of `arm` from the given responsibilities.
ArmState update_parameters(const InteractionHistory& history, const ArmResponsibilities& resp,
                           const PriorHyperparams& priors, std::size_t arm,
                           UpdateDiagnostics* diagnostics = nullptr);

struct InferenceResult {
  VariationalState state;
  Responsibilities responsibilities;
  std::size_t iterations = 0;
  bool converged = false;  // false when max_iterations was reached
  double final_delta = 0.0;
  std::size_t rate_clamps = 0;
  std::size_t invariant_checks = 0;  // sweeps whose invariants were verified
};

// Called after every sweep with the 1-based sweep index.
using SweepObserver =
    std::function<void(std::size_t sweep, const VariationalState&, const Responsibilities&)>;

struct InferenceOptions {
  ConvergenceSettings settings;
  KernelMode mode = KernelMode::Serial;
  // Stream for the one-off symmetry-breaking jitter; jitter is skipped when null.
  RngStream* jitter_rng = nullptr;
  SweepObserver observer;
};

// Alternates responsibilities and parameter updates over all arms, warm-starting from
// `state`, until the largest responsibility change between consecutive sweeps is below
// the tolerance or max_iterations sweeps have run.
InferenceResult run_inference(const InteractionHistory& history, const VariationalState& state,
                              const PriorHyperparams& priors, const InferenceOptions& options);

// Evidence lower bound of one arm for arbitrary (state, responsibilities).
double elbo_diagnostic(const InteractionHistory& history, const VariationalState& state,
                       const ArmResponsibilities& resp, const PriorHyperparams& priors,
                       std::size_t arm);

// Throws InvariantError when a row does not sum to one within 1e-12 or the responsibility
// mass of an arm differs from its observation count by more than 1e-9.
void check_inference_invariants(const InteractionHistory& history, const VariationalState& state,
                                const Responsibilities& resp, const PriorHyperparams& priors);

}  // namespace vts
