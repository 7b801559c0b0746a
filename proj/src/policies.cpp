// SPDX-License-Identifier: Apache-2.0
#include "loopbench/policies.hpp"

#include <algorithm>

#include "loopbench/error.hpp"

namespace loopbench {

bool LocalView::in_conflict() const {
  return std::any_of(neighbor_colors.begin(), neighbor_colors.end(),
                     [this](const auto& entry) { return entry.second == own_color; });
}

LocalView make_local_view(const Graph& g, const Coloring& col, NodeId v) {
  LocalView view;
  view.own_color = col[static_cast<std::size_t>(v)];
  view.palette_size = col.palette_size();
  for (NodeId u : g.neighbors(v)) view.neighbor_colors.emplace(u, col[static_cast<std::size_t>(u)]);
  return view;
}

std::vector<Color> best_response_colors(const LocalView& view) {
  std::vector<std::size_t> uses(static_cast<std::size_t>(view.palette_size), 0);
  for (const auto& [id, color] : view.neighbor_colors) ++uses[static_cast<std::size_t>(color)];
  const std::size_t fewest = *std::min_element(uses.begin(), uses.end());
  std::vector<Color> best;
  for (std::size_t k = 0; k < uses.size(); ++k) {
    if (uses[k] == fewest) best.push_back(static_cast<Color>(k));
  }
  return best;
}

namespace {

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::invalid_argument, "update probability must be in [0, 1]");
}

Color random_best_response(const LocalView& view, RandomStream& rng) {
  const auto best = best_response_colors(view);
  return best[rng.next_below(best.size())];
}

}  // namespace

Color decide_soft_fp(const LocalView& view, double p, RandomStream& rng) {
  check_probability(p);
  if (!rng.bernoulli(p)) return view.own_color;
  return random_best_response(view, rng);
}

Color decide_soft_cfp(const LocalView& view, double p, RandomStream& rng) {
  check_probability(p);
  if (!view.in_conflict()) return view.own_color;
  return decide_soft_fp(view, p, rng);
}

Color decide_conservative_random(const LocalView& view, RandomStream& rng) {
  if (!view.in_conflict()) return view.own_color;
  return decide_random(view, rng);
}

Color decide_random(const LocalView& view, RandomStream& rng) {
  return static_cast<Color>(rng.next_below(static_cast<std::uint64_t>(view.palette_size)));
}

Color decide_greedy_deterministic(const LocalView& view) { return best_response_colors(view).front(); }

std::string_view to_string(PolicyId id) {
  switch (id) {
    case PolicyId::soft_fp: return "soft_fp";
    case PolicyId::soft_cfp: return "soft_cfp";
    case PolicyId::conservative_random: return "conservative_random";
    case PolicyId::random: return "random";
    case PolicyId::greedy_det: return "greedy_det";
    case PolicyId::llm: return "llm";
  }
  return "unknown";
}

std::optional<PolicyId> parse_policy_id(std::string_view text) {
  for (PolicyId id : {PolicyId::soft_fp, PolicyId::soft_cfp, PolicyId::conservative_random, PolicyId::random,
                      PolicyId::greedy_det, PolicyId::llm}) {
    if (to_string(id) == text) return id;
  }
  return std::nullopt;
}

Color decide(const PolicySpec& spec, const LocalView& view, RandomStream& rng) {
  switch (spec.id) {
    case PolicyId::soft_fp: return decide_soft_fp(view, spec.p, rng);
    case PolicyId::soft_cfp: return decide_soft_cfp(view, spec.p, rng);
    case PolicyId::conservative_random: return decide_conservative_random(view, rng);
    case PolicyId::random: return decide_random(view, rng);
    case PolicyId::greedy_det: return decide_greedy_deterministic(view);
    case PolicyId::llm: break;
  }
  throw Error(ErrorKind::invalid_argument, "policy 'llm' needs an agent backend, not a local decision rule");
}

}  // namespace loopbench
