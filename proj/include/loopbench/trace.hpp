// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "loopbench/config.hpp"
#include "loopbench/graph.hpp"
#include "loopbench/metrics.hpp"

namespace loopbench {

enum class DecisionSource { policy, llm, scripted, fallback };

std::string_view to_string(DecisionSource source);
std::optional<DecisionSource> parse_decision_source(std::string_view text);

struct NodeDecision {
  NodeId node = 0;
  Color color = 0;
  std::string strategy;
  DecisionSource source = DecisionSource::policy;
  int attempts = 0;                        // transport attempts, model-backed agents only
  std::optional<std::string> raw_response;  // model message content as received
  std::optional<std::string> error;         // why a fallback happened
  std::optional<std::string> system_prompt;  // only with prompt logging
  std::optional<std::string> user_prompt;    // only with prompt logging
  std::optional<nlohmann::ordered_json> request_log;  // credential already redacted

  friend bool operator==(const NodeDecision&, const NodeDecision&) = default;
};

struct RoundRecord {
  std::size_t round = 0;  // 1-based
  std::vector<Color> coloring;
  ConflictReport conflicts;
  std::vector<NodeDecision> decisions;  // indexed by node
  std::optional<double> elapsed_ms;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

enum class RunStatus { running, completed, aborted };

struct RunTrace {
  ExperimentConfig config;
  std::size_t repeat_index = 0;
  std::uint64_t run_seed = 0;
  std::size_t init_attempts = 1;
  std::size_t conf_best = 0;
  Graph graph = make_cycle(3);
  Coloring initial{std::vector<Color>(3, 0), 2};
  ConflictReport initial_conflicts;
  std::map<NodeId, std::string> injected_notes;
  std::vector<RoundRecord> rounds;
  RunStatus status = RunStatus::running;
  std::optional<RunMetrics> metrics;
  std::optional<std::string> abort_reason;

  /// Coloring after `round` rounds; round 0 is the initial state.
  const std::vector<Color>& coloring_at(std::size_t round) const;
  const ConflictReport& conflicts_at(std::size_t round) const;
  ConflictSeries conflict_series() const;

  friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

inline constexpr int kTraceFormatVersion = 1;

/// JSONL: a header line, one line per round, a closing status line. A
/// trace without its closing line is treated as truncated.
std::string serialize_trace(const RunTrace& trace);
RunTrace parse_trace(std::string_view text);

void persist_trace(const RunTrace& trace, const std::filesystem::path& path);
RunTrace load_trace(const std::filesystem::path& path);

}  // namespace loopbench
