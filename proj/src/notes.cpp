// SPDX-License-Identifier: Apache-2.0
#include "loopbench/notes.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "loopbench/error.hpp"

namespace loopbench {

NoteLedger::NoteLedger(std::size_t node_count) : entries_(node_count) {}

void NoteLedger::append(NodeId node, NoteEntry entry) {
  if (node < 0 || static_cast<std::size_t>(node) >= entries_.size()) {
    throw Error(ErrorKind::invalid_argument, "node " + std::to_string(node) + " not in ledger");
  }
  auto& list = entries_[static_cast<std::size_t>(node)];
  if (!list.empty() && list.back().round >= entry.round) {
    throw Error(ErrorKind::sequencing, "note for node " + std::to_string(node) + " stamped " +
                                           std::to_string(entry.round) + " after one stamped " +
                                           std::to_string(list.back().round));
  }
  list.push_back(std::move(entry));
}

void NoteLedger::record(NodeId node, std::string text) {
  NoteEntry entry;
  entry.round = current_round_ + 1;
  entry.tags = lint_strategy(text);
  entry.text = std::move(text);
  append(node, std::move(entry));
}

std::string_view NoteLedger::notes_for(NodeId node, std::size_t round) const {
  const auto& list = history(node);
  for (auto it = list.rbegin(); it != list.rend(); ++it) {
    if (it->round <= round) return it->text;
  }
  return {};
}

const std::vector<NoteEntry>& NoteLedger::history(NodeId node) const {
  if (node < 0 || static_cast<std::size_t>(node) >= entries_.size()) {
    throw Error(ErrorKind::invalid_argument, "node " + std::to_string(node) + " not in ledger");
  }
  return entries_[static_cast<std::size_t>(node)];
}

NoteLedger inject_notes(NoteLedger ledger, const std::map<NodeId, std::string>& seeds) {
  if (ledger.current_round_ != 0) {
    throw Error(ErrorKind::sequencing,
                "notes can only be injected before round 0, ledger is at round " + std::to_string(ledger.current_round_));
  }
  for (const auto& [node, text] : seeds) {
    NoteEntry entry;
    entry.round = 0;
    entry.text = text;
    entry.tags = lint_strategy(text);
    entry.provenance = NoteProvenance::injected;
    ledger.append(node, std::move(entry));
  }
  return ledger;
}

std::map<NodeId, std::string> parse_injection(std::string_view content, std::size_t node_count) {
  std::map<NodeId, std::string> seeds;
  const auto first = content.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && content[first] == '{') {
    nlohmann::json doc = nlohmann::json::parse(content, nullptr, /*allow_exceptions=*/false);
    if (doc.is_object()) {
      for (const auto& [key, value] : doc.items()) {
        if (!value.is_string()) throw Error(ErrorKind::format, "injection entry for '" + key + "' is not a string");
        std::size_t used = 0;
        int node = -1;
        try {
          node = std::stoi(key, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != key.size() || node < 0 || static_cast<std::size_t>(node) >= node_count) {
          throw Error(ErrorKind::format, "injection key '" + key + "' is not a node id of this graph");
        }
        seeds[node] = value.get<std::string>();
      }
      return seeds;
    }
  }
  std::string text(content);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  if (text.empty()) throw Error(ErrorKind::format, "injection file is empty");
  for (std::size_t v = 0; v < node_count; ++v) seeds[static_cast<NodeId>(v)] = text;
  return seeds;
}

std::map<NodeId, std::string> load_injection_file(const std::filesystem::path& path, std::size_t node_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::config, "cannot open injection file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_injection(buffer.str(), node_count);
}

}  // namespace loopbench
