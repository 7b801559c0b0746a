// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "loopbench/graph.hpp"
#include "loopbench/policies.hpp"

namespace loopbench {

struct AgentSpec {
  PolicyId policy = PolicyId::soft_fp;
  double p = kDefaultUpdateProbability;

  // The remaining fields only matter for `llm`.
  std::string model;
  std::string backend = "openai";  // "openai" | "scripted"
  std::string script;              // script file for the scripted backend
  double temperature = 1.0;
  std::map<std::string, std::string> params;  // provider pass-through, e.g. reasoning_effort
  std::size_t recent_window = 5;
  std::size_t history_cap = 0;  // 0 keeps the full history
  int max_retries = 3;
  double backoff_base_seconds = 1.0;
  double timeout_seconds = 120.0;
  std::size_t concurrency = 8;

  friend bool operator==(const AgentSpec&, const AgentSpec&) = default;
};

struct ExperimentConfig {
  std::string family = "cycle";
  std::size_t n = 5;
  int colors = 2;
  AgentSpec agent;
  std::size_t steps = 15;
  std::size_t repeats = 5;
  std::uint64_t seed = 0;
  InitMode init = UniformInit{0};
  std::optional<std::size_t> conf_best;
  std::optional<std::string> inject_file;
  std::string out_dir = "out";
  bool log_prompts = false;
  bool record_timing = false;
  std::size_t worker_threads = 1;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Throws ErrorKind::config describing the first invalid field.
void validate(const ExperimentConfig& cfg);

/// Parses the TOML form. Relative `script`/`inject` paths are resolved
/// against `base_dir`.
ExperimentConfig parse_config_toml(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::ordered_json& j);

Graph make_graph(const ExperimentConfig& cfg);
/// "C5" style label used in result tables.
std::string graph_label(const ExperimentConfig& cfg);
/// Policy id, or "llm:<model>" for model-backed agents.
std::string agent_label(const ExperimentConfig& cfg);

}  // namespace loopbench
