// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "loopbench/config.hpp"
#include "loopbench/llm_client.hpp"
#include "loopbench/metrics.hpp"
#include "loopbench/trace.hpp"

namespace loopbench {

/// Backend described by an llm config: the scripted backend for
/// `backend = "scripted"`, otherwise the HTTP backend configured from the
/// environment.
std::unique_ptr<Backend> make_backend(const ExperimentConfig& cfg);

struct ExperimentOptions {
  /// Overrides make_backend when set (tests, probes).
  Backend* backend = nullptr;
  bool write_files = true;
};

struct ExperimentResult {
  MetricsRow row;
  std::string csv_row;
  std::vector<RunMetrics> runs;
  std::vector<std::filesystem::path> trace_files;
  std::vector<std::size_t> aborted;  // repeat indices excluded from the row
};

/// Runs `cfg.repeats` simulations, persists each trace under
/// <out>/<graph>_<agent>/run<i>.jsonl, appends the aggregated row to
/// <out>/results.csv and writes summary.json next to the traces.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& options = {});

/// Directory name used for an experiment's traces.
std::string experiment_dir_name(const ExperimentConfig& cfg);

/// Re-derives result rows from persisted traces (*.jsonl found recursively).
/// Completed runs only; stored metrics must match the recomputed ones.
/// Returns CSV text including the header.
std::string aggregate_traces(const std::vector<std::filesystem::path>& roots);

/// Per-round note text of one node with tag counts, for reading how a
/// strategy evolved.
std::string strategy_evolution(const RunTrace& trace, NodeId node);

}  // namespace loopbench
