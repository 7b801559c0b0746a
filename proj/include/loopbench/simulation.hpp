// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "loopbench/config.hpp"
#include "loopbench/error.hpp"
#include "loopbench/llm_client.hpp"
#include "loopbench/trace.hpp"

namespace loopbench {

/// Thrown when a run cannot continue. Carries everything recorded so far.
class AbortedRunError : public Error {
 public:
  AbortedRunError(const std::string& message, RunTrace partial)
      : Error(ErrorKind::aborted_run, message), partial_(std::move(partial)) {}

  const RunTrace& partial_trace() const noexcept { return partial_; }

 private:
  RunTrace partial_;
};

struct SimulationHooks {
  /// Required for the `llm` policy; shared by all concurrent requests.
  Backend* backend = nullptr;
  /// Seed notes for prompt round 0.
  std::map<NodeId, std::string> injected_notes;
  /// Called after each round is recorded.
  std::function<void(const RunTrace&)> on_round;
};

/// Consecutive all-fallback rounds after which a model-backed run aborts.
inline constexpr std::size_t kMaxFailedRounds = 3;
/// Attempts at drawing a random initial coloring above conf_best.
inline constexpr std::size_t kMaxInitAttempts = 100;

/// Seed of repeat `repeat_index` under the config's master seed.
std::uint64_t repeat_seed(const ExperimentConfig& cfg, std::size_t repeat_index);

/// Runs one synchronous simulation of `cfg.steps` rounds.
///
/// Every node decides from the state left by the previous round; all
/// decisions are applied together. Classical policies draw from streams
/// keyed by (run seed, node, round), so the result does not depend on the
/// order or threading of node evaluations.
RunTrace run_simulation(const ExperimentConfig& cfg, std::size_t repeat_index, const SimulationHooks& hooks = {});

}  // namespace loopbench
