// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "loopbench/graph.hpp"
#include "loopbench/random.hpp"

namespace loopbench {

/// What a node may see of the current state: its own color and its
/// neighbors' colors, nothing else.
struct LocalView {
  Color own_color = 0;
  std::map<NodeId, Color> neighbor_colors;
  int palette_size = 1;

  bool in_conflict() const;
};

LocalView make_local_view(const Graph& g, const Coloring& col, NodeId v);

/// Colors with the fewest occurrences among the neighbors, ascending.
std::vector<Color> best_response_colors(const LocalView& view);

inline constexpr double kDefaultUpdateProbability = 0.3;

// Soft colorer, fixed probability: with probability p move to a uniformly
// chosen best response, otherwise hold.
Color decide_soft_fp(const LocalView& view, double p, RandomStream& rng);

// As decide_soft_fp, but conflict-free nodes never move.
Color decide_soft_cfp(const LocalView& view, double p, RandomStream& rng);

// Conflicted nodes resample uniformly over the whole palette.
Color decide_conservative_random(const LocalView& view, RandomStream& rng);

Color decide_random(const LocalView& view, RandomStream& rng);

/// Lowest-indexed best response. Deterministic; used to show the deadlock.
Color decide_greedy_deterministic(const LocalView& view);

enum class PolicyId { soft_fp, soft_cfp, conservative_random, random, greedy_det, llm };

std::string_view to_string(PolicyId id);
std::optional<PolicyId> parse_policy_id(std::string_view text);

struct PolicySpec {
  PolicyId id = PolicyId::soft_fp;
  double p = kDefaultUpdateProbability;
};

/// Dispatch for the classical policies. `llm` is not decidable here.
Color decide(const PolicySpec& spec, const LocalView& view, RandomStream& rng);

}  // namespace loopbench
