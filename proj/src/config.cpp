// SPDX-License-Identifier: Apache-2.0
#include "loopbench/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#define TOML_HEADER_ONLY 1
#include <toml.hpp>

#include "loopbench/error.hpp"

namespace loopbench {

namespace {

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorKind::config, message); }

void reject_unknown_keys(const toml::table& table, const std::string& section, const std::set<std::string>& known) {
  for (const auto& [key, node] : table) {
    if (!known.contains(std::string(key.str()))) {
      config_error("unknown key '" + std::string(key.str()) + "' in [" + section + "]");
    }
  }
}

template <typename T>
std::optional<T> read(const toml::table& table, const std::string& section, std::string_view key) {
  const toml::node* node = table.get(key);
  if (node == nullptr) return std::nullopt;
  if constexpr (std::is_same_v<T, double>) {
    if (auto v = node->value<double>()) return *v;
  } else if constexpr (std::is_same_v<T, bool>) {
    if (node->is_boolean()) return node->value<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (node->is_string()) return node->value<std::string>();
  } else {
    if (node->is_integer()) {
      const auto raw = *node->value<std::int64_t>();
      if (raw < 0) config_error("[" + section + "] " + std::string(key) + " must be non-negative");
      return static_cast<T>(raw);
    }
  }
  config_error("[" + section + "] " + std::string(key) + " has the wrong type");
}

std::string resolve(const std::filesystem::path& base, const std::string& path) {
  if (path.empty() || base.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (base / path).lexically_normal().string();
}

std::string init_mode_name(const InitMode& mode) {
  if (std::holds_alternative<UniformInit>(mode)) return "uniform";
  if (std::holds_alternative<ExplicitInit>(mode)) return "explicit";
  return "random";
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  if (cfg.family != "cycle") config_error("unsupported graph family '" + cfg.family + "'");
  if (cfg.n < 3) config_error("cycle needs n >= 3");
  if (cfg.colors < 1) config_error("colors must be >= 1");
  if (cfg.steps < 2) config_error("steps must be >= 2 (stability needs two rounds)");
  if (cfg.repeats < 1) config_error("repeats must be >= 1");
  if (!(cfg.agent.p >= 0.0 && cfg.agent.p <= 1.0)) config_error("agent.p must be in [0, 1]");
  if (const auto* u = std::get_if<UniformInit>(&cfg.init); u && (u->color < 0 || u->color >= cfg.colors)) {
    config_error("init_color outside the palette");
  }
  if (const auto* e = std::get_if<ExplicitInit>(&cfg.init)) {
    if (e->colors.size() != cfg.n) config_error("initial_coloring length does not match n");
    for (Color c : e->colors) {
      if (c < 0 || c >= cfg.colors) config_error("initial_coloring entry outside the palette");
    }
  }
  if (cfg.agent.policy == PolicyId::llm) {
    if (cfg.agent.backend != "openai" && cfg.agent.backend != "scripted") {
      config_error("agent.backend must be 'openai' or 'scripted'");
    }
    if (cfg.agent.backend == "openai" && cfg.agent.model.empty()) config_error("agent.model is required for llm");
    if (cfg.agent.concurrency < 1) config_error("agent.concurrency must be >= 1");
    if (cfg.agent.recent_window < 1) config_error("agent.recent_window must be >= 1");
  } else if (cfg.inject_file) {
    config_error("note injection needs an llm agent");
  }
  if (cfg.worker_threads < 1) config_error("threads must be >= 1");
}

ExperimentConfig parse_config_toml(std::string_view text, const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& ex) {
    std::ostringstream msg;
    msg << "TOML parse error at line " << ex.source().begin.line << ": " << ex.description();
    config_error(msg.str());
  }
  reject_unknown_keys(root, "root", {"graph", "agent", "run"});

  ExperimentConfig cfg;
  if (const auto* graph = root["graph"].as_table()) {
    reject_unknown_keys(*graph, "graph", {"family", "n", "colors"});
    if (auto v = read<std::string>(*graph, "graph", "family")) cfg.family = *v;
    if (auto v = read<std::size_t>(*graph, "graph", "n")) cfg.n = *v;
    if (auto v = read<std::size_t>(*graph, "graph", "colors")) cfg.colors = static_cast<int>(*v);
  }
  if (const auto* agent = root["agent"].as_table()) {
    reject_unknown_keys(*agent, "agent",
                        {"policy", "p", "model", "backend", "script", "temperature", "params", "recent_window",
                         "history_cap", "max_retries", "backoff_base", "timeout", "concurrency"});
    AgentSpec& a = cfg.agent;
    if (auto v = read<std::string>(*agent, "agent", "policy")) {
      auto id = parse_policy_id(*v);
      if (!id) config_error("unknown policy '" + *v + "'");
      a.policy = *id;
    }
    if (auto v = read<double>(*agent, "agent", "p")) a.p = *v;
    if (auto v = read<std::string>(*agent, "agent", "model")) a.model = *v;
    if (auto v = read<std::string>(*agent, "agent", "backend")) a.backend = *v;
    if (auto v = read<std::string>(*agent, "agent", "script")) a.script = resolve(base_dir, *v);
    if (auto v = read<double>(*agent, "agent", "temperature")) a.temperature = *v;
    if (auto v = read<std::size_t>(*agent, "agent", "recent_window")) a.recent_window = *v;
    if (auto v = read<std::size_t>(*agent, "agent", "history_cap")) a.history_cap = *v;
    if (auto v = read<std::size_t>(*agent, "agent", "max_retries")) a.max_retries = static_cast<int>(*v);
    if (auto v = read<double>(*agent, "agent", "backoff_base")) a.backoff_base_seconds = *v;
    if (auto v = read<double>(*agent, "agent", "timeout")) a.timeout_seconds = *v;
    if (auto v = read<std::size_t>(*agent, "agent", "concurrency")) a.concurrency = *v;
    if (const auto* params = (*agent)["params"].as_table()) {
      for (const auto& [key, node] : *params) {
        // Non-string values keep their TOML spelling and are re-parsed as JSON on the wire.
        if (node.is_string()) {
          a.params[std::string(key.str())] = *node.value<std::string>();
        } else {
          std::ostringstream out;
          out << toml::json_formatter{node};
          a.params[std::string(key.str())] = out.str();
        }
      }
    }
  }
  if (const auto* run = root["run"].as_table()) {
    reject_unknown_keys(*run, "run",
                        {"steps", "repeats", "seed", "init", "init_color", "initial_coloring", "conf_best", "inject",
                         "out", "log_prompts", "record_timing", "threads"});
    if (auto v = read<std::size_t>(*run, "run", "steps")) cfg.steps = *v;
    if (auto v = read<std::size_t>(*run, "run", "repeats")) cfg.repeats = *v;
    if (auto v = read<std::size_t>(*run, "run", "seed")) cfg.seed = *v;
    const std::string mode = read<std::string>(*run, "run", "init").value_or("uniform");
    if (mode == "random") {
      cfg.init = RandomInit{};
    } else if (mode == "uniform") {
      cfg.init = UniformInit{static_cast<Color>(read<std::size_t>(*run, "run", "init_color").value_or(0))};
    } else if (mode == "explicit") {
      const auto* list = (*run)["initial_coloring"].as_array();
      if (list == nullptr) config_error("init = \"explicit\" requires initial_coloring");
      ExplicitInit init;
      for (const auto& item : *list) {
        if (!item.is_integer()) config_error("initial_coloring must hold integers");
        init.colors.push_back(static_cast<Color>(*item.value<std::int64_t>()));
      }
      cfg.init = std::move(init);
    } else {
      config_error("unknown init mode '" + mode + "'");
    }
    if (auto v = read<std::size_t>(*run, "run", "conf_best")) cfg.conf_best = *v;
    if (auto v = read<std::string>(*run, "run", "inject")) cfg.inject_file = resolve(base_dir, *v);
    if (auto v = read<std::string>(*run, "run", "out")) cfg.out_dir = *v;
    if (auto v = read<bool>(*run, "run", "log_prompts")) cfg.log_prompts = *v;
    if (auto v = read<bool>(*run, "run", "record_timing")) cfg.record_timing = *v;
    if (auto v = read<std::size_t>(*run, "run", "threads")) cfg.worker_threads = *v;
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_error("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_toml(buffer.str(), path.parent_path());
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json init = {{"mode", init_mode_name(cfg.init)}};
  if (const auto* u = std::get_if<UniformInit>(&cfg.init)) init["color"] = u->color;
  if (const auto* e = std::get_if<ExplicitInit>(&cfg.init)) init["colors"] = e->colors;

  const AgentSpec& a = cfg.agent;
  nlohmann::ordered_json agent = {{"policy", to_string(a.policy)}, {"p", a.p}};
  if (a.policy == PolicyId::llm) {
    agent["model"] = a.model;
    agent["backend"] = a.backend;
    agent["script"] = a.script;
    agent["temperature"] = a.temperature;
    agent["params"] = a.params;
    agent["recent_window"] = a.recent_window;
    agent["history_cap"] = a.history_cap;
    agent["max_retries"] = a.max_retries;
    agent["backoff_base"] = a.backoff_base_seconds;
    agent["timeout"] = a.timeout_seconds;
    agent["concurrency"] = a.concurrency;
  }

  nlohmann::ordered_json j = {
      {"graph", {{"family", cfg.family}, {"n", cfg.n}, {"colors", cfg.colors}}},
      {"agent", std::move(agent)},
      {"steps", cfg.steps},
      {"repeats", cfg.repeats},
      {"seed", cfg.seed},
      {"init", std::move(init)},
      {"conf_best", cfg.conf_best ? nlohmann::ordered_json(*cfg.conf_best) : nlohmann::ordered_json()},
      {"inject", cfg.inject_file ? nlohmann::ordered_json(*cfg.inject_file) : nlohmann::ordered_json()},
      {"out", cfg.out_dir},
      {"log_prompts", cfg.log_prompts},
      {"record_timing", cfg.record_timing},
      {"threads", cfg.worker_threads},
  };
  return j;
}

ExperimentConfig config_from_json(const nlohmann::ordered_json& j) {
  try {
    ExperimentConfig cfg;
    const auto& graph = j.at("graph");
    cfg.family = graph.at("family").get<std::string>();
    cfg.n = graph.at("n").get<std::size_t>();
    cfg.colors = graph.at("colors").get<int>();

    const auto& agent = j.at("agent");
    auto id = parse_policy_id(agent.at("policy").get<std::string>());
    if (!id) throw Error(ErrorKind::format, "unknown policy in config snapshot");
    cfg.agent.policy = *id;
    cfg.agent.p = agent.at("p").get<double>();
    if (cfg.agent.policy == PolicyId::llm) {
      AgentSpec& a = cfg.agent;
      a.model = agent.at("model").get<std::string>();
      a.backend = agent.at("backend").get<std::string>();
      a.script = agent.at("script").get<std::string>();
      a.temperature = agent.at("temperature").get<double>();
      a.params = agent.at("params").get<std::map<std::string, std::string>>();
      a.recent_window = agent.at("recent_window").get<std::size_t>();
      a.history_cap = agent.at("history_cap").get<std::size_t>();
      a.max_retries = agent.at("max_retries").get<int>();
      a.backoff_base_seconds = agent.at("backoff_base").get<double>();
      a.timeout_seconds = agent.at("timeout").get<double>();
      a.concurrency = agent.at("concurrency").get<std::size_t>();
    }

    cfg.steps = j.at("steps").get<std::size_t>();
    cfg.repeats = j.at("repeats").get<std::size_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    const auto& init = j.at("init");
    const auto mode = init.at("mode").get<std::string>();
    if (mode == "uniform") {
      cfg.init = UniformInit{init.at("color").get<Color>()};
    } else if (mode == "explicit") {
      cfg.init = ExplicitInit{init.at("colors").get<std::vector<Color>>()};
    } else {
      cfg.init = RandomInit{};
    }
    if (!j.at("conf_best").is_null()) cfg.conf_best = j.at("conf_best").get<std::size_t>();
    if (!j.at("inject").is_null()) cfg.inject_file = j.at("inject").get<std::string>();
    cfg.out_dir = j.at("out").get<std::string>();
    cfg.log_prompts = j.at("log_prompts").get<bool>();
    cfg.record_timing = j.at("record_timing").get<bool>();
    cfg.worker_threads = j.at("threads").get<std::size_t>();
    return cfg;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::format, std::string("malformed config snapshot: ") + ex.what());
  }
}

Graph make_graph(const ExperimentConfig& cfg) {
  if (cfg.family != "cycle") throw Error(ErrorKind::config, "unsupported graph family '" + cfg.family + "'");
  return make_cycle(cfg.n);
}

std::string graph_label(const ExperimentConfig& cfg) { return "C" + std::to_string(cfg.n); }

std::string agent_label(const ExperimentConfig& cfg) {
  if (cfg.agent.policy != PolicyId::llm) return std::string(to_string(cfg.agent.policy));
  if (cfg.agent.backend == "scripted") return "llm:scripted";
  return "llm:" + cfg.agent.model;
}

}  // namespace loopbench
