// SPDX-License-Identifier: Apache-2.0
#include "loopbench/graph.hpp"

#include <algorithm>
#include <string>

#include "loopbench/error.hpp"
#include "loopbench/random.hpp"

namespace loopbench {

Graph::Graph(std::size_t node_count, std::vector<std::pair<NodeId, NodeId>> edges) {
  if (node_count == 0) throw Error(ErrorKind::invalid_instance, "graph must have at least one node");
  const auto n = static_cast<NodeId>(node_count);
  edges_.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw Error(ErrorKind::invalid_instance,
                  "edge {" + std::to_string(u) + "," + std::to_string(v) + "} out of range");
    }
    if (u == v) throw Error(ErrorKind::invalid_instance, "self-loop at node " + std::to_string(u));
    edges_.push_back(Edge{std::min(u, v), std::max(u, v)});
  }
  std::sort(edges_.begin(), edges_.end());
  if (auto dup = std::adjacent_find(edges_.begin(), edges_.end()); dup != edges_.end()) {
    throw Error(ErrorKind::invalid_instance,
                "duplicate edge {" + std::to_string(dup->u) + "," + std::to_string(dup->v) + "}");
  }
  adjacency_.resize(node_count);
  for (const Edge& e : edges_) {
    adjacency_[static_cast<std::size_t>(e.u)].push_back(e.v);
    adjacency_[static_cast<std::size_t>(e.v)].push_back(e.u);
  }
  for (auto& list : adjacency_) std::sort(list.begin(), list.end());
}

Coloring::Coloring(std::vector<Color> assignment, int palette_size)
    : assignment_(std::move(assignment)), palette_size_(palette_size) {
  if (palette_size_ < 1) throw Error(ErrorKind::invalid_argument, "palette size must be at least 1");
  for (std::size_t v = 0; v < assignment_.size(); ++v) {
    if (assignment_[v] < 0 || assignment_[v] >= palette_size_) {
      throw Error(ErrorKind::invalid_argument, "color " + std::to_string(assignment_[v]) + " of node " +
                                                   std::to_string(v) + " outside palette of size " +
                                                   std::to_string(palette_size_));
    }
  }
}

Graph make_cycle(std::size_t n) {
  if (n < 3) throw Error(ErrorKind::invalid_instance, "cycle needs at least 3 nodes, got " + std::to_string(n));
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>((i + 1) % n));
  }
  return Graph(n, std::move(edges));
}

namespace {

std::size_t count_conflicts(const Graph& g, std::span<const Color> colors) {
  std::size_t total = 0;
  for (const Edge& e : g.edges()) {
    if (colors[static_cast<std::size_t>(e.u)] == colors[static_cast<std::size_t>(e.v)]) ++total;
  }
  return total;
}

void check_capacity(const Graph& g, int colors) {
  std::uint64_t states = 1;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    states *= static_cast<std::uint64_t>(colors);
    if (states > kEnumerationLimit) {
      throw Error(ErrorKind::capacity, std::to_string(colors) + "^" + std::to_string(g.node_count()) +
                                           " colorings exceed the enumeration limit of " +
                                           std::to_string(kEnumerationLimit) + "; supply conf_best explicitly");
    }
  }
}

}  // namespace

ConflictReport conflict_report(const Graph& g, const Coloring& col) {
  if (col.size() != g.node_count()) {
    throw Error(ErrorKind::dimension, "coloring has " + std::to_string(col.size()) + " entries for a graph with " +
                                          std::to_string(g.node_count()) + " nodes");
  }
  ConflictReport report;
  report.per_node.assign(g.node_count(), 0);
  for (const Edge& e : g.edges()) {
    if (col[static_cast<std::size_t>(e.u)] == col[static_cast<std::size_t>(e.v)]) {
      ++report.total;
      ++report.per_node[static_cast<std::size_t>(e.u)];
      ++report.per_node[static_cast<std::size_t>(e.v)];
    }
  }
  return report;
}

std::size_t min_conflicts_bruteforce(const Graph& g, int colors) {
  if (colors < 1) throw Error(ErrorKind::invalid_argument, "palette size must be at least 1");
  check_capacity(g, colors);
  // Base-c counter over all assignments.
  std::vector<Color> digits(g.node_count(), 0);
  std::size_t best = g.edge_count();
  while (true) {
    best = std::min(best, count_conflicts(g, digits));
    if (best == 0) return 0;
    std::size_t i = 0;
    while (i < digits.size() && ++digits[i] == colors) digits[i++] = 0;
    if (i == digits.size()) break;
  }
  return best;
}

int chromatic_number_bruteforce(const Graph& g) {
  for (int c = 1;; ++c) {
    if (min_conflicts_bruteforce(g, c) == 0) return c;
  }
}

Coloring init_coloring(const Graph& g, int colors, const InitMode& mode, std::uint64_t seed) {
  if (colors < 1) throw Error(ErrorKind::invalid_argument, "palette size must be at least 1");
  const std::size_t n = g.node_count();
  if (const auto* uniform = std::get_if<UniformInit>(&mode)) {
    if (uniform->color < 0 || uniform->color >= colors) {
      throw Error(ErrorKind::invalid_argument, "uniform init color " + std::to_string(uniform->color) +
                                                   " outside palette of size " + std::to_string(colors));
    }
    return Coloring(std::vector<Color>(n, uniform->color), colors);
  }
  if (const auto* fixed = std::get_if<ExplicitInit>(&mode)) {
    if (fixed->colors.size() != n) {
      throw Error(ErrorKind::dimension, "explicit init has " + std::to_string(fixed->colors.size()) +
                                            " colors for " + std::to_string(n) + " nodes");
    }
    return Coloring(fixed->colors, colors);
  }
  RandomStream stream = derive_stream(seed, 0, 0);
  std::vector<Color> assignment(n);
  for (auto& color : assignment) color = static_cast<Color>(stream.next_below(static_cast<std::uint64_t>(colors)));
  return Coloring(std::move(assignment), colors);
}

nlohmann::ordered_json graph_to_json(const Graph& g) {
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.u, e.v});
  return {{"n", g.node_count()}, {"edges", std::move(edges)}};
}

Graph graph_from_json(const nlohmann::ordered_json& j) {
  try {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw Error(ErrorKind::format, "edge entry must be a pair");
      edges.emplace_back(e[0].get<NodeId>(), e[1].get<NodeId>());
    }
    return Graph(j.at("n").get<std::size_t>(), std::move(edges));
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::format, std::string("malformed graph: ") + ex.what());
  }
}

}  // namespace loopbench
