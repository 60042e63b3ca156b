#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vts/config.hpp"
#include "vts/metrics.hpp"

namespace vts {

// Raised when more than 1% of the realizations of one K fail numerically.
class ExperimentFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Stream ids inside one realization.
enum StreamId : std::uint64_t {
  kContextStream = 0,
  kPolicyStream = 1,
  kRewardStream = 2,
  kJitterStream = 3,
  kSharedContextStream = 0x5c0e7e47ULL,
};

std::uint64_t realization_seed(std::uint64_t master_seed, std::size_t realization,
                               std::size_t k_index);

struct RealizationStats {
  std::size_t inference_calls = 0;
  std::size_t sweeps = 0;
  std::size_t unconverged_calls = 0;
  std::size_t rate_clamps = 0;
  std::size_t invariant_checks = 0;
};

// One full bandit loop: context -> select arm -> reward -> history -> inference.
RealizationTrace run_realization(const ExperimentConfig& config, std::size_t k_index,
                                 std::size_t realization, RealizationStats* stats = nullptr);

struct FailedRealization {
  std::size_t realization = 0;
  std::uint64_t seed = 0;
  std::string error;
};

struct SweepResult {
  std::size_t components = 0;
  AggregateResult aggregate;
  std::vector<std::uint64_t> seeds;  // indexed by realization
  std::vector<FailedRealization> failures;
  RealizationStats totals;
};

struct ExperimentResult {
  std::vector<SweepResult> sweeps;  // one per configured K, in config order
};

enum class Execution {
  Serial,    // reference loop
  Parallel,  // OpenMP across realizations
};

struct RunOptions {
  Execution execution = Execution::Parallel;
  std::size_t workers = 1;
};

// Deterministic in (config, master_seed) for any execution mode and worker count.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace vts
