// SPDX-License-Identifier: Apache-2.0
#include "loopbench/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <thread>
#include <vector>

#include "loopbench/notes.hpp"
#include "loopbench/observation.hpp"
#include "loopbench/policies.hpp"
#include "loopbench/prompt.hpp"
#include "loopbench/random.hpp"

namespace loopbench {

namespace {

constexpr std::uint64_t kInitSalt = 0x1f83d9abfb41bd6bULL;

/// Runs body(i) for i in [0, count) on up to `workers` threads. Work is
/// handed out through a shared atomic counter; results must be written by
/// index. Exceptions are captured per index.
template <typename F>
std::vector<std::exception_ptr> parallel_for(std::size_t count, std::size_t workers, F&& body) {
  std::vector<std::exception_ptr> errors(count);
  auto run = [&](std::size_t i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) run(i);
    return errors;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) run(i);
      });
    }
  }
  return errors;
}

Coloring draw_initial(const Graph& g, const ExperimentConfig& cfg, std::uint64_t run_seed, std::size_t conf_best,
                      std::size_t& attempts) {
  if (!std::holds_alternative<RandomInit>(cfg.init)) {
    attempts = 1;
    Coloring col = init_coloring(g, cfg.colors, cfg.init, run_seed);
    if (conflict_report(g, col).total <= conf_best) {
      throw Error(ErrorKind::degenerate_series, "initial coloring already has conf_best conflicts; proximity undefined");
    }
    return col;
  }
  const std::uint64_t init_seed = derive_seed(run_seed, kInitSalt);
  for (attempts = 1; attempts <= kMaxInitAttempts; ++attempts) {
    Coloring col = init_coloring(g, cfg.colors, RandomInit{}, derive_seed(init_seed, attempts - 1));
    if (conflict_report(g, col).total > conf_best) return col;
  }
  throw Error(ErrorKind::degenerate_series, "no random initial coloring above conf_best in " +
                                                std::to_string(kMaxInitAttempts) + " attempts");
}

std::string run_id(const ExperimentConfig& cfg, std::size_t repeat_index) {
  return graph_label(cfg) + "/" + agent_label(cfg) + "/seed" + std::to_string(cfg.seed) + "/r" +
         std::to_string(repeat_index);
}

}  // namespace

std::uint64_t repeat_seed(const ExperimentConfig& cfg, std::size_t repeat_index) {
  return derive_seed(cfg.seed, repeat_index);
}

RunTrace run_simulation(const ExperimentConfig& cfg, std::size_t repeat_index, const SimulationHooks& hooks) {
  validate(cfg);
  const bool model_backed = cfg.agent.policy == PolicyId::llm;
  if (model_backed && hooks.backend == nullptr) {
    throw Error(ErrorKind::invalid_argument, "llm policy needs a backend");
  }
  if (!model_backed && !hooks.injected_notes.empty()) {
    throw Error(ErrorKind::invalid_argument, "note injection needs an llm agent");
  }

  RunTrace trace;
  trace.config = cfg;
  trace.repeat_index = repeat_index;
  trace.run_seed = repeat_seed(cfg, repeat_index);
  trace.graph = make_graph(cfg);
  trace.conf_best = cfg.conf_best ? *cfg.conf_best : min_conflicts_bruteforce(trace.graph, cfg.colors);
  trace.initial = draw_initial(trace.graph, cfg, trace.run_seed, trace.conf_best, trace.init_attempts);
  trace.initial_conflicts = conflict_report(trace.graph, trace.initial);
  trace.injected_notes = hooks.injected_notes;

  const std::size_t n = trace.graph.node_count();
  NoteLedger ledger = inject_notes(NoteLedger(n), hooks.injected_notes);
  const PolicySpec policy{cfg.agent.policy, cfg.agent.p};
  const ObservationOptions obs_options{cfg.agent.recent_window, cfg.agent.history_cap};
  const auto schema = response_schema(cfg.colors);
  const std::string id = run_id(cfg, repeat_index);
  std::size_t failed_rounds = 0;

  for (std::size_t t = 1; t <= cfg.steps; ++t) {
    const auto started = std::chrono::steady_clock::now();
    const std::size_t prompt_round = t - 1;
    const Coloring current(trace.coloring_at(prompt_round), cfg.colors);
    std::vector<NodeDecision> decisions(n);

    std::vector<std::exception_ptr> errors;
    if (!model_backed) {
      errors = parallel_for(n, cfg.worker_threads, [&](std::size_t i) {
        const auto v = static_cast<NodeId>(i);
        RandomStream stream = derive_stream(trace.run_seed, i, t);
        NodeDecision& d = decisions[i];
        d.node = v;
        d.color = decide(policy, make_local_view(trace.graph, current, v), stream);
        d.source = DecisionSource::policy;
      });
    } else {
      errors = parallel_for(n, cfg.agent.concurrency, [&](std::size_t i) {
        const auto v = static_cast<NodeId>(i);
        NodeDecision& d = decisions[i];
        d.node = v;
        d.color = current[i];
        d.source = DecisionSource::fallback;

        AgentObservation obs = build_observation(trace, v, prompt_round, obs_options);
        const RenderedPrompt prompt = render_prompt(obs, ledger.notes_for(v, prompt_round));
        CompletionRequest request;
        request.model = cfg.agent.model;
        request.system_text = prompt.system_text;
        request.user_text = prompt.user_text;
        request.temperature = cfg.agent.temperature;
        request.response_schema = schema;
        request.timeout = std::chrono::milliseconds(static_cast<long long>(cfg.agent.timeout_seconds * 1000.0));
        request.params = cfg.agent.params;
        request.metadata = RequestMetadata{id, v, prompt_round};
        request.observation = std::move(obs);
        if (cfg.log_prompts) {
          d.system_prompt = prompt.system_text;
          d.user_prompt = prompt.user_text;
        }

        try {
          CompletionResult result = hooks.backend->complete(request);
          d.attempts = result.attempts;
          d.raw_response = result.content;
          if (cfg.log_prompts) d.request_log = std::move(result.request_log);
          const AgentDecision parsed = parse_decision(result.content, cfg.colors);
          d.color = parsed.color;
          d.strategy = parsed.strategy;
          d.source = hooks.backend->source();
        } catch (const TransportError& ex) {
          if (ex.kind() == ErrorKind::auth) throw;
          d.attempts = ex.attempts();
          d.error = std::string(to_string(ex.kind())) + ": " + ex.what();
        } catch (const Error& ex) {
          if (ex.kind() == ErrorKind::script_gap) throw;
          d.error = std::string(to_string(ex.kind())) + ": " + ex.what();
        }
      });
    }

    for (const auto& error : errors) {
      if (!error) continue;
      try {
        std::rethrow_exception(error);
      } catch (const Error& ex) {
        if (!model_backed) throw;
        trace.status = RunStatus::aborted;
        trace.abort_reason = std::string(to_string(ex.kind())) + ": " + ex.what();
        throw AbortedRunError("run " + id + " aborted in round " + std::to_string(t) + ": " + *trace.abort_reason,
                              trace);
      }
    }

    // Barrier: every decision of round t is known; apply them together.
    RoundRecord record;
    record.round = t;
    record.coloring.reserve(n);
    for (const auto& d : decisions) record.coloring.push_back(d.color);
    record.conflicts = conflict_report(trace.graph, Coloring(record.coloring, cfg.colors));
    record.decisions = std::move(decisions);
    if (cfg.record_timing) {
      record.elapsed_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    }

    if (model_backed) {
      bool all_failed = true;
      for (const auto& d : record.decisions) {
        if (d.source == DecisionSource::fallback) continue;
        all_failed = false;
        ledger.record(d.node, d.strategy);
      }
      ledger.advance();
      failed_rounds = all_failed ? failed_rounds + 1 : 0;
    }
    trace.rounds.push_back(std::move(record));
    if (hooks.on_round) hooks.on_round(trace);

    if (failed_rounds >= kMaxFailedRounds) {
      trace.status = RunStatus::aborted;
      trace.abort_reason = "every agent failed for " + std::to_string(failed_rounds) + " consecutive rounds";
      throw AbortedRunError("run " + id + " aborted: " + *trace.abort_reason, trace);
    }
  }

  trace.metrics = compute_metrics(trace.conflict_series());
  trace.status = RunStatus::completed;
  return trace;
}

}  // namespace loopbench
