// SPDX-License-Identifier: Apache-2.0
#include "loopbench/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "loopbench/error.hpp"
#include "loopbench/notes.hpp"
#include "loopbench/prompt.hpp"
#include "loopbench/simulation.hpp"

namespace loopbench {

std::unique_ptr<Backend> make_backend(const ExperimentConfig& cfg) {
  if (cfg.agent.policy != PolicyId::llm) return nullptr;
  if (cfg.agent.backend == "scripted") {
    if (cfg.agent.script.empty()) throw Error(ErrorKind::config, "agent.script is required for the scripted backend");
    return std::make_unique<ScriptedBackend>(load_script(cfg.agent.script));
  }
  ApiSettings settings = settings_from_environment();
  settings.retry.max_retries = cfg.agent.max_retries;
  settings.retry.backoff_base =
      std::chrono::milliseconds(static_cast<long long>(cfg.agent.backoff_base_seconds * 1000.0));
  auto transport = make_http_transport(settings.api_base);
  return std::make_unique<ChatCompletionsBackend>(std::move(settings), std::move(transport));
}

std::string experiment_dir_name(const ExperimentConfig& cfg) {
  std::string name = graph_label(cfg) + "_" + agent_label(cfg);
  std::replace_if(name.begin(), name.end(), [](char c) { return c == ':' || c == '/' || c == ' '; }, '-');
  return name;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& options) {
  validate(cfg);
  std::unique_ptr<Backend> owned;
  Backend* backend = options.backend;
  if (backend == nullptr && cfg.agent.policy == PolicyId::llm) {
    owned = make_backend(cfg);
    backend = owned.get();
  }

  SimulationHooks hooks;
  hooks.backend = backend;
  if (cfg.inject_file) hooks.injected_notes = load_injection_file(*cfg.inject_file, cfg.n);

  const std::filesystem::path dir = std::filesystem::path(cfg.out_dir) / experiment_dir_name(cfg);
  ExperimentResult result;
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    const auto path = dir / ("run" + std::to_string(r) + ".jsonl");
    try {
      RunTrace trace = run_simulation(cfg, r, hooks);
      result.runs.push_back(*trace.metrics);
      if (options.write_files) {
        persist_trace(trace, path);
        result.trace_files.push_back(path);
      }
    } catch (const AbortedRunError& ex) {
      result.aborted.push_back(r);
      if (options.write_files) {
        persist_trace(ex.partial_trace(), path);
        result.trace_files.push_back(path);
      }
    }
  }
  if (result.runs.empty()) {
    throw Error(ErrorKind::aborted_run, "all " + std::to_string(cfg.repeats) + " runs aborted");
  }
  result.row = aggregate(result.runs);
  result.csv_row = format_csv_row(graph_label(cfg), agent_label(cfg), result.row);

  if (options.write_files) {
    std::filesystem::create_directories(dir);
    const auto csv = std::filesystem::path(cfg.out_dir) / "results.csv";
    const bool fresh = !std::filesystem::exists(csv);
    std::ofstream out(csv, std::ios::app);
    if (fresh) out << kCsvHeader << '\n';
    out << result.csv_row << '\n';

    nlohmann::ordered_json summary = {
        {"graph", graph_label(cfg)},
        {"agent", agent_label(cfg)},
        {"proximity_mean", result.row.proximity_mean},
        {"proximity_std", result.row.proximity_std},
        {"stability_mean", result.row.stability_mean},
        {"stability_std", result.row.stability_std},
        {"repeats", result.row.repeats},
        {"aborted_repeats", result.aborted},
    };
    std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
  }
  return result;
}

std::string aggregate_traces(const std::vector<std::filesystem::path>& roots) {
  std::vector<std::filesystem::path> files;
  for (const auto& root : roots) {
    if (std::filesystem::is_regular_file(root)) {
      files.push_back(root);
      continue;
    }
    if (!std::filesystem::is_directory(root)) throw Error(ErrorKind::config, "no such trace path " + root.string());
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::map<std::pair<std::string, std::string>, std::vector<RunMetrics>> groups;
  for (const auto& file : files) {
    const RunTrace trace = load_trace(file);
    if (trace.status != RunStatus::completed) continue;
    const RunMetrics recomputed = compute_metrics(trace.conflict_series());
    if (!trace.metrics || !(*trace.metrics == recomputed)) {
      throw Error(ErrorKind::format, "stored metrics in " + file.string() + " do not match its conflict series");
    }
    groups[{graph_label(trace.config), agent_label(trace.config)}].push_back(recomputed);
  }
  if (groups.empty()) throw Error(ErrorKind::insufficient_data, "no completed traces found");

  std::string csv = std::string(kCsvHeader) + "\n";
  for (const auto& [key, runs] : groups) csv += format_csv_row(key.first, key.second, aggregate(runs)) + "\n";
  return csv;
}

namespace {

void append_indented(std::string& out, std::string_view text) {
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    out += "    ";
    out += text.substr(start, end - start);
    out += '\n';
    start = end + 1;
  }
}

}  // namespace

std::string strategy_evolution(const RunTrace& trace, NodeId node) {
  if (node < 0 || static_cast<std::size_t>(node) >= trace.graph.node_count()) {
    throw Error(ErrorKind::invalid_argument, "node " + std::to_string(node) + " not in graph");
  }
  TagReport totals;
  auto add = [&totals](const TagReport& r) {
    totals.new_count += r.new_count;
    totals.modified_count += r.modified_count;
    totals.same_count += r.same_count;
    totals.violations += r.violations;
  };

  std::string out = "node " + std::to_string(node) + " (" + graph_label(trace.config) + ", " +
                    agent_label(trace.config) + ", repeat " + std::to_string(trace.repeat_index) + ")\n";
  if (auto it = trace.injected_notes.find(node); it != trace.injected_notes.end()) {
    const TagReport tags = lint_strategy(it->second);
    add(tags);
    out += "round 0 [injected]\n";
    append_indented(out, it->second);
  }
  for (const auto& round : trace.rounds) {
    const auto& d = round.decisions.at(static_cast<std::size_t>(node));
    out += "round " + std::to_string(round.round) + " [" + std::string(to_string(d.source)) +
           "] color=" + std::to_string(d.color);
    if (d.source == DecisionSource::fallback) {
      out += " (no new note)\n";
      continue;
    }
    const TagReport tags = lint_strategy(d.strategy);
    add(tags);
    out += " NEW=" + std::to_string(tags.new_count) + " MODIFIED=" + std::to_string(tags.modified_count) +
           " SAME=" + std::to_string(tags.same_count) + " violations=" + std::to_string(tags.violations) + "\n";
    if (!d.strategy.empty()) append_indented(out, d.strategy);
  }
  out += "total NEW=" + std::to_string(totals.new_count) + " MODIFIED=" + std::to_string(totals.modified_count) +
         " SAME=" + std::to_string(totals.same_count) + " violations=" + std::to_string(totals.violations) + "\n";
  return out;
}

}  // namespace loopbench
