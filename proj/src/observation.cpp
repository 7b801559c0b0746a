// SPDX-License-Identifier: Apache-2.0
#include "loopbench/observation.hpp"

#include <algorithm>
#include <set>

#include "loopbench/error.hpp"

namespace loopbench {

std::string AgentObservation::status() const {
  if (current_conflicts == 0) return "CONFLICT FREE";
  return std::to_string(current_conflicts) + " CONFLICTS";
}

AgentObservation build_observation(const RunTrace& trace, NodeId node, std::size_t round_index,
                                   const ObservationOptions& options) {
  if (round_index > trace.rounds.size()) {
    throw Error(ErrorKind::sequencing, "observation for round " + std::to_string(round_index) + " needs " +
                                           std::to_string(round_index) + " completed rounds, trace has " +
                                           std::to_string(trace.rounds.size()));
  }
  if (node < 0 || static_cast<std::size_t>(node) >= trace.graph.node_count()) {
    throw Error(ErrorKind::invalid_argument, "node " + std::to_string(node) + " not in graph");
  }
  const auto v = static_cast<std::size_t>(node);
  const auto neighbors = trace.graph.neighbors(node);

  AgentObservation obs;
  obs.node_id = node;
  obs.round_index = round_index;
  obs.degree = neighbors.size();
  obs.neighbor_ids.assign(neighbors.begin(), neighbors.end());
  for (Color k = 0; k < trace.initial.palette_size(); ++k) obs.available_colors.push_back(k);

  const auto& current = trace.coloring_at(round_index);
  obs.own_color = current[v];
  std::set<Color> used;
  for (NodeId u : neighbors) {
    const Color c = current[static_cast<std::size_t>(u)];
    obs.neighbor_colors[u] = c;
    used.insert(c);
  }
  obs.colors_used_by_neighbors.assign(used.begin(), used.end());
  obs.current_conflicts = trace.conflicts_at(round_index).per_node[v];

  const std::size_t first = (options.history_cap == 0 || options.history_cap > round_index + 1)
                                ? 0
                                : round_index + 1 - options.history_cap;
  for (std::size_t t = first; t <= round_index; ++t) {
    const auto& coloring = trace.coloring_at(t);
    obs.own_color_history.push_back(coloring[v]);
    obs.own_conflict_history.push_back(trace.conflicts_at(t).per_node[v]);
    for (NodeId u : neighbors) obs.neighbor_color_histories[u].push_back(coloring[static_cast<std::size_t>(u)]);
  }

  std::map<Color, std::size_t> conflict_sums;
  for (std::size_t i = 0; i < obs.own_color_history.size(); ++i) {
    auto& stats = obs.color_performance[obs.own_color_history[i]];
    ++stats.rounds_used;
    conflict_sums[obs.own_color_history[i]] += obs.own_conflict_history[i];
  }
  for (auto& [color, stats] : obs.color_performance) {
    stats.mean_conflicts = static_cast<double>(conflict_sums[color]) / static_cast<double>(stats.rounds_used);
  }

  const std::size_t window = std::min(options.recent_window, obs.own_conflict_history.size());
  std::size_t recent = 0;
  for (std::size_t i = obs.own_conflict_history.size() - window; i < obs.own_conflict_history.size(); ++i) {
    recent += obs.own_conflict_history[i];
  }
  obs.recent_conflict_rate = window == 0 ? 0.0 : static_cast<double>(recent) / static_cast<double>(window);
  return obs;
}

LocalView to_local_view(const AgentObservation& obs) {
  return LocalView{obs.own_color, obs.neighbor_colors, static_cast<int>(obs.available_colors.size())};
}

}  // namespace loopbench
