// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "loopbench/observation.hpp"

namespace loopbench {

extern const std::string_view kSystemPrompt;
/// Rendered in place of the private notes before any note exists.
extern const std::string_view kEmptyNotes;

struct RenderedPrompt {
  std::string system_text;
  std::string user_text;
};

/// Pure function of its inputs. Empty `notes` renders as kEmptyNotes.
RenderedPrompt render_prompt(const AgentObservation& obs, std::string_view notes);

/// Strict object schema: integer `color` restricted to 0..colors-1 and
/// string `strategy`, both required, nothing else allowed.
nlohmann::ordered_json response_schema(int colors);

/// Validates `value` against the subset of JSON Schema produced by
/// response_schema (type, enum, properties, required,
/// additionalProperties). Returns an empty string when valid, otherwise a
/// description of the first violation.
std::string schema_violation(const nlohmann::ordered_json& schema, const nlohmann::ordered_json& value);

struct AgentDecision {
  Color color = 0;
  std::string strategy;
};

/// Parses and validates a structured model response. Throws DecisionError
/// (kind parse or validation) carrying the raw payload.
AgentDecision parse_decision(std::string_view raw, int colors);

struct TagReport {
  std::size_t new_count = 0;
  std::size_t modified_count = 0;
  std::size_t same_count = 0;
  std::size_t violations = 0;
  std::vector<std::string> untagged_lines;

  friend bool operator==(const TagReport&, const TagReport&) = default;
};

/// Classifies each non-empty line by its leading [NEW]/[MODIFIED]/[SAME]
/// tag. Advisory only; never throws.
TagReport lint_strategy(std::string_view text);

}  // namespace loopbench
