// SPDX-License-Identifier: Apache-2.0
#include "loopbench/prompt.hpp"

#include <cstdio>
#include <sstream>

#include "loopbench/error.hpp"

namespace loopbench {

const std::string_view kSystemPrompt =
    "You are a node in a graph coloring problem. Your goal is to achieve a stable global coloring where no "
    "neighbors share the same color.";

const std::string_view kEmptyNotes = "(none yet)";

namespace {

constexpr std::string_view kPreamble =
    "You are a node in a graph coloring problem. Your task is to choose a color that minimizes conflicts in the "
    "global graph (but you can only observe your immediate neighbors). Consider all information provided below "
    "to develop a strategy and choose a color.";

constexpr std::string_view kNoteRules =
    "Based on your experience, update your private notes with concise, transferable insights. Focus on "
    "documenting general patterns and strategies that have emerged from observing neighbor behavior and "
    "conflict resolution, not specific color choices. Your notes should be a single string containing a list "
    "of strategies written in a concise, pseudocode-like style. When updating, follow these rules:\n"
    "1. Prefix each strategy with `[NEW]`, `[MODIFIED]`, or `[SAME]`.\n"
    "2. If modifying, keep the original wording as much as possible.\n"
    "3. Use a newline to separate different strategies.";

std::string fixed2(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

template <typename T>
std::string render_list(const std::vector<T>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i != 0) out += ", ";
    out += std::to_string(items[i]);
  }
  return out + "]";
}

template <typename K, typename V, typename F>
std::string render_map(const std::map<K, V>& items, F&& render_value) {
  std::string out = "{";
  bool first = true;
  for (const auto& [key, value] : items) {
    if (!first) out += ", ";
    first = false;
    out += std::to_string(key) + ": " + render_value(value);
  }
  return out + "}";
}

}  // namespace

RenderedPrompt render_prompt(const AgentObservation& obs, std::string_view notes) {
  std::string u;
  u += kPreamble;
  u += "\n\n### LOCAL INFORMATION:\n";
  u += "- Your current color: " + std::to_string(obs.own_color) + "\n";
  u += "- Neighbors' colors: " + render_map(obs.neighbor_colors, [](Color c) { return std::to_string(c); }) + "\n";
  u += "- Available colors: " + render_list(obs.available_colors) + "\n";
  u += "- Colors currently used by neighbors: " + render_list(obs.colors_used_by_neighbors) + "\n";

  u += "\n### STRUCTURAL INFORMATION:\n";
  u += "- Your node ID: " + std::to_string(obs.node_id) + "\n";
  u += "- Number of neighbors (node degree): " + std::to_string(obs.degree) + "\n";
  u += "- Neighbor IDs: " + render_list(obs.neighbor_ids) + "\n";

  u += "\n### HISTORICAL DATA:\n";
  u += "- Your color history: " + render_list(obs.own_color_history) + "\n";
  u += "- Your conflict history: " + render_list(obs.own_conflict_history) + "\n";
  u += "- Neighbors' color history: " +
       render_map(obs.neighbor_color_histories, [](const std::vector<Color>& h) { return render_list(h); }) + "\n";
  u += "- Color performance history: " + render_map(obs.color_performance, [](const ColorStats& s) {
         return "{rounds_used: " + std::to_string(s.rounds_used) + ", mean_conflicts: " + fixed2(s.mean_conflicts) +
                "}";
       }) + "\n";

  u += "\n### PERFORMANCE FEEDBACK:\n";
  u += "- Current conflict count: " + std::to_string(obs.current_conflicts) + " neighbors share your color\n";
  u += "- Recent conflict rate: " + fixed2(obs.recent_conflict_rate) + " conflicts per turn\n";
  u += "- Current success status: " + obs.status() + "\n";

  u += "\n### MY PRIVATE NOTES:\n";
  u += notes.empty() ? kEmptyNotes : notes;
  u += "\n\n";
  u += kNoteRules;
  u += "\n";
  return RenderedPrompt{std::string(kSystemPrompt), std::move(u)};
}

nlohmann::ordered_json response_schema(int colors) {
  if (colors < 1) throw Error(ErrorKind::invalid_argument, "palette size must be at least 1");
  nlohmann::ordered_json palette = nlohmann::ordered_json::array();
  for (int k = 0; k < colors; ++k) palette.push_back(k);
  return {
      {"type", "object"},
      {"properties",
       {{"color", {{"type", "integer"}, {"enum", std::move(palette)}}}, {"strategy", {{"type", "string"}}}}},
      {"required", {"color", "strategy"}},
      {"additionalProperties", false},
  };
}

namespace {

bool has_type(const nlohmann::ordered_json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "integer") return value.is_number_integer();
  if (type == "number") return value.is_number();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  return false;
}

std::string violation_at(const nlohmann::ordered_json& schema, const nlohmann::ordered_json& value,
                         const std::string& where) {
  if (schema.contains("type") && !has_type(value, schema["type"].get<std::string>())) {
    return where + ": expected " + schema["type"].get<std::string>();
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& allowed : schema["enum"]) found = found || allowed == value;
    if (!found) return where + ": value " + value.dump() + " not in enum " + schema["enum"].dump();
  }
  if (!value.is_object()) return {};
  if (schema.contains("required")) {
    for (const auto& key : schema["required"]) {
      if (!value.contains(key.get<std::string>())) return where + ": missing required property '" + key.get<std::string>() + "'";
    }
  }
  const auto properties = schema.value("properties", nlohmann::ordered_json::object());
  for (const auto& [key, item] : value.items()) {
    if (properties.contains(key)) {
      if (auto v = violation_at(properties[key], item, where + "." + key); !v.empty()) return v;
    } else if (schema.contains("additionalProperties") && schema["additionalProperties"] == false) {
      return where + ": unexpected property '" + key + "'";
    }
  }
  return {};
}

}  // namespace

std::string schema_violation(const nlohmann::ordered_json& schema, const nlohmann::ordered_json& value) {
  return violation_at(schema, value, "$");
}

AgentDecision parse_decision(std::string_view raw, int colors) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(raw);
  } catch (const nlohmann::json::parse_error& ex) {
    throw DecisionError(ErrorKind::parse, std::string("response is not JSON: ") + ex.what(), std::string(raw));
  }
  if (auto violation = schema_violation(response_schema(colors), doc); !violation.empty()) {
    throw DecisionError(ErrorKind::validation, violation, std::string(raw));
  }
  AgentDecision decision{doc["color"].get<Color>(), doc["strategy"].get<std::string>()};
  if (decision.strategy.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw DecisionError(ErrorKind::validation, "$.strategy: empty strategy", std::string(raw));
  }
  return decision;
}

TagReport lint_strategy(std::string_view text) {
  TagReport report;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;

    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    line.remove_prefix(first);
    if (line.starts_with("[NEW]")) {
      ++report.new_count;
    } else if (line.starts_with("[MODIFIED]")) {
      ++report.modified_count;
    } else if (line.starts_with("[SAME]")) {
      ++report.same_count;
    } else {
      ++report.violations;
      report.untagged_lines.emplace_back(line);
    }
  }
  return report;
}

}  // namespace loopbench
