// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace loopbench {

using NodeId = int;
using Color = int;

struct Edge {
  NodeId u;
  NodeId v;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected simple graph on nodes 0..n-1.
///
/// Edges are normalized to u < v and kept sorted, which also fixes the
/// serialized form. Immutable after construction.
class Graph {
 public:
  Graph(std::size_t node_count, std::vector<std::pair<NodeId, NodeId>> edges);

  std::size_t node_count() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Neighbors of `v` in ascending id order.
  std::span<const NodeId> neighbors(NodeId v) const { return adjacency_.at(static_cast<std::size_t>(v)); }
  std::size_t degree(NodeId v) const { return neighbors(v).size(); }

  friend bool operator==(const Graph& a, const Graph& b) { return a.edges_ == b.edges_ && a.node_count() == b.node_count(); }

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> adjacency_;
};

/// A full assignment of palette colors to nodes.
class Coloring {
 public:
  Coloring(std::vector<Color> assignment, int palette_size);

  int palette_size() const noexcept { return palette_size_; }
  std::size_t size() const noexcept { return assignment_.size(); }
  Color operator[](std::size_t v) const { return assignment_[v]; }
  const std::vector<Color>& assignment() const noexcept { return assignment_; }

  friend bool operator==(const Coloring&, const Coloring&) = default;

 private:
  std::vector<Color> assignment_;
  int palette_size_;
};

struct ConflictReport {
  std::size_t total = 0;
  /// Conflicted edges incident to each node, i.e. neighbors sharing its color.
  std::vector<std::size_t> per_node;

  friend bool operator==(const ConflictReport&, const ConflictReport&) = default;
};

/// Upper bound on c^n for the exhaustive oracles.
inline constexpr std::uint64_t kEnumerationLimit = 10'000'000;

Graph make_cycle(std::size_t n);

ConflictReport conflict_report(const Graph& g, const Coloring& col);

/// Exact minimum number of conflicted edges over all c-colorings.
/// Throws ErrorKind::capacity when c^n exceeds kEnumerationLimit.
std::size_t min_conflicts_bruteforce(const Graph& g, int colors);

/// Smallest palette admitting a conflict-free coloring.
int chromatic_number_bruteforce(const Graph& g);

struct UniformInit {
  Color color = 0;
  friend bool operator==(const UniformInit&, const UniformInit&) = default;
};
struct RandomInit {
  friend bool operator==(const RandomInit&, const RandomInit&) = default;
};
struct ExplicitInit {
  std::vector<Color> colors;
  friend bool operator==(const ExplicitInit&, const ExplicitInit&) = default;
};
using InitMode = std::variant<UniformInit, RandomInit, ExplicitInit>;

Coloring init_coloring(const Graph& g, int colors, const InitMode& mode, std::uint64_t seed);

/// `{"n": n, "edges": [[u, v], ...]}` with u < v, edges sorted.
nlohmann::ordered_json graph_to_json(const Graph& g);
Graph graph_from_json(const nlohmann::ordered_json& j);

}  // namespace loopbench
