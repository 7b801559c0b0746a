// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "loopbench/graph.hpp"
#include "loopbench/policies.hpp"
#include "loopbench/trace.hpp"

namespace loopbench {

struct ColorStats {
  std::size_t rounds_used = 0;
  double mean_conflicts = 0.0;

  friend bool operator==(const ColorStats&, const ColorStats&) = default;
};

/// Everything one node is allowed to know before deciding in a round.
/// Histories run oldest to newest and start with the initial state.
struct AgentObservation {
  NodeId node_id = 0;
  std::size_t round_index = 0;
  std::size_t degree = 0;
  std::vector<NodeId> neighbor_ids;
  Color own_color = 0;
  std::map<NodeId, Color> neighbor_colors;
  std::vector<Color> available_colors;
  std::vector<Color> colors_used_by_neighbors;  // distinct, ascending
  std::vector<Color> own_color_history;
  std::vector<std::size_t> own_conflict_history;
  std::map<NodeId, std::vector<Color>> neighbor_color_histories;
  std::map<Color, ColorStats> color_performance;
  std::size_t current_conflicts = 0;
  double recent_conflict_rate = 0.0;

  /// "CONFLICT FREE" or "<k> CONFLICTS".
  std::string status() const;

  friend bool operator==(const AgentObservation&, const AgentObservation&) = default;
};

struct ObservationOptions {
  std::size_t recent_window = 5;
  std::size_t history_cap = 0;  // keep only the newest K entries; 0 keeps all
};

/// Observation for `node` before prompt round `round_index` (0-based).
/// Reads the initial state and trace rounds 1..round_index only, so later
/// rounds already present in `trace` are never visible.
AgentObservation build_observation(const RunTrace& trace, NodeId node, std::size_t round_index,
                                   const ObservationOptions& options = {});

/// The current-state slice of an observation.
LocalView to_local_view(const AgentObservation& obs);

}  // namespace loopbench
