// SPDX-License-Identifier: Apache-2.0
#include "loopbench/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "loopbench/config.hpp"
#include "loopbench/error.hpp"
#include "loopbench/experiment.hpp"
#include "loopbench/graph.hpp"
#include "loopbench/trace.hpp"

namespace loopbench {

namespace {

struct RunFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> steps;
  std::optional<std::size_t> repeats;
  std::optional<std::string> inject;
  bool log_prompts = false;
  std::optional<std::string> out;
};

void add_run_flags(CLI::App* cmd, RunFlags& flags) {
  cmd->add_option("--config", flags.config, "Experiment config (TOML)")->required();
  cmd->add_option("--seed", flags.seed, "Master seed override");
  cmd->add_option("--steps", flags.steps, "Rounds per run");
  cmd->add_option("--repeats", flags.repeats, "Runs per experiment");
  cmd->add_option("--inject", flags.inject, "Seed notes: text file or JSON {\"node_id\": text}");
  cmd->add_flag("--log-prompts", flags.log_prompts, "Store prompts and redacted requests in traces");
  cmd->add_option("--out", flags.out, "Output directory");
}

ExperimentConfig resolve_config(const RunFlags& flags) {
  ExperimentConfig cfg = load_config(flags.config);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.steps) cfg.steps = *flags.steps;
  if (flags.repeats) cfg.repeats = *flags.repeats;
  if (flags.inject) cfg.inject_file = *flags.inject;
  if (flags.log_prompts) cfg.log_prompts = true;
  if (flags.out) cfg.out_dir = *flags.out;
  validate(cfg);
  return cfg;
}

void report_experiment(const ExperimentConfig& cfg, const ExperimentResult& result, std::ostream& out) {
  out << kCsvHeader << '\n' << result.csv_row << '\n';
  out << "traces=" << (std::filesystem::path(cfg.out_dir) / experiment_dir_name(cfg)).string();
  out << " aborted=" << result.aborted.size() << '\n';
}

int fail(std::ostream& err, ErrorKind kind, const std::string& message) {
  err << "error kind=" << to_string(kind) << " message=" << nlohmann::json(message).dump() << '\n';
  return (kind == ErrorKind::usage || kind == ErrorKind::config) ? 2 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synchronous symmetry-breaking benchmark for graph-coloring agents", "loopbench"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run one experiment config");
  add_run_flags(run, run_flags);

  RunFlags distill_flags;
  auto* distill = app.add_subcommand("distill", "Run an experiment with seeded notes in every round-0 prompt");
  add_run_flags(distill, distill_flags);
  distill->get_option("--inject")->required();

  std::vector<std::string> aggregate_paths;
  std::optional<std::string> aggregate_out;
  auto* agg = app.add_subcommand("aggregate", "Re-derive result rows from trace directories");
  agg->add_option("paths", aggregate_paths, "Trace files or directories")->required();
  agg->add_option("--out", aggregate_out, "Write CSV here instead of stdout");

  std::size_t oracle_cycle = 0;
  int oracle_colors = 2;
  auto* oracle = app.add_subcommand("oracle", "Exact minimum conflicts and chromatic number");
  oracle->add_option("--cycle", oracle_cycle, "Cycle length")->required();
  oracle->add_option("--colors", oracle_colors, "Palette size")->check(CLI::PositiveNumber);

  std::string strategies_trace;
  std::optional<int> strategies_node;
  auto* strategies = app.add_subcommand("strategies", "Show how nodes' private notes evolved in a trace");
  strategies->add_option("--trace", strategies_trace, "Trace file (.jsonl)")->required();
  strategies->add_option("--node", strategies_node, "Node id (default: all nodes)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::ParseError& ex) {
    return fail(err, ErrorKind::usage, ex.what());
  }

  try {
    if (run->parsed() || distill->parsed()) {
      const ExperimentConfig cfg = resolve_config(run->parsed() ? run_flags : distill_flags);
      report_experiment(cfg, run_experiment(cfg), out);
    } else if (agg->parsed()) {
      std::vector<std::filesystem::path> roots(aggregate_paths.begin(), aggregate_paths.end());
      const std::string csv = aggregate_traces(roots);
      if (aggregate_out) {
        std::ofstream file(*aggregate_out);
        if (!file) throw Error(ErrorKind::config, "cannot write " + *aggregate_out);
        file << csv;
      } else {
        out << csv;
      }
    } else if (oracle->parsed()) {
      const Graph g = make_cycle(oracle_cycle);
      out << "min_conflicts=" << min_conflicts_bruteforce(g, oracle_colors)
          << " chromatic=" << chromatic_number_bruteforce(g) << '\n';
    } else if (strategies->parsed()) {
      const RunTrace trace = load_trace(strategies_trace);
      if (strategies_node) {
        out << strategy_evolution(trace, *strategies_node);
      } else {
        for (std::size_t v = 0; v < trace.graph.node_count(); ++v) {
          out << strategy_evolution(trace, static_cast<NodeId>(v));
        }
      }
    }
  } catch (const Error& ex) {
    return fail(err, ex.kind(), ex.what());
  } catch (const std::exception& ex) {
    return fail(err, ErrorKind::format, ex.what());
  }
  return 0;
}

}  // namespace loopbench
