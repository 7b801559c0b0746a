// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "loopbench/graph.hpp"
#include "loopbench/prompt.hpp"

namespace loopbench {

enum class NoteProvenance { agent, injected };

struct NoteEntry {
  /// Prompt round this note is fed into.
  std::size_t round = 0;
  std::string text;
  TagReport tags;
  NoteProvenance provenance = NoteProvenance::agent;
};

/// Per-node private notes. A note written while answering prompt round r
/// is stamped r + 1, the round whose prompt carries it.
class NoteLedger {
 public:
  explicit NoteLedger(std::size_t node_count);

  std::size_t node_count() const noexcept { return entries_.size(); }

  /// Next prompt round to be rendered; advances once per simulated round.
  std::size_t current_round() const noexcept { return current_round_; }
  void advance() noexcept { ++current_round_; }

  /// Records `text` as written during the current round. Stamps must
  /// strictly increase per node.
  void record(NodeId node, std::string text);

  /// Latest note stamped at or before `round`, or empty.
  std::string_view notes_for(NodeId node, std::size_t round) const;

  const std::vector<NoteEntry>& history(NodeId node) const;

 private:
  friend NoteLedger inject_notes(NoteLedger ledger, const std::map<NodeId, std::string>& seeds);

  void append(NodeId node, NoteEntry entry);

  std::vector<std::vector<NoteEntry>> entries_;
  std::size_t current_round_ = 0;
};

/// Seeds nodes' round-0 notes. Only valid before the first round.
NoteLedger inject_notes(NoteLedger ledger, const std::map<NodeId, std::string>& seeds);

/// Reads an injection file: a JSON object {"node_id": "text"} gives
/// per-node seeds, any other UTF-8 text seeds every node.
std::map<NodeId, std::string> load_injection_file(const std::filesystem::path& path, std::size_t node_count);
std::map<NodeId, std::string> parse_injection(std::string_view content, std::size_t node_count);

}  // namespace loopbench
