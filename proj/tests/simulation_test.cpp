// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <atomic>
#include <mutex>
#include <thread>

#include "loopbench/error.hpp"
#include "loopbench/experiment.hpp"
#include "loopbench/llm_client.hpp"
#include "loopbench/simulation.hpp"
#include "loopbench/trace.hpp"
#include "reference_oracles.hpp"

using namespace loopbench;

namespace {

ExperimentConfig classical(std::size_t n, PolicyId policy, InitMode init = UniformInit{0}) {
  ExperimentConfig cfg;
  cfg.n = n;
  cfg.agent.policy = policy;
  cfg.init = std::move(init);
  return cfg;
}

ExperimentConfig scripted(std::size_t n, std::size_t steps) {
  ExperimentConfig cfg;
  cfg.n = n;
  cfg.steps = steps;
  cfg.agent.policy = PolicyId::llm;
  cfg.agent.backend = "scripted";
  return cfg;
}

/// Records every observation it is shown and checks the round barrier:
/// no request for round r + 1 starts while a round-r request is open.
class ProbeBackend final : public Backend {
 public:
  CompletionResult complete(const CompletionRequest& request) override {
    const std::size_t round = request.metadata.round;
    {
      std::lock_guard lock(mu_);
      if (round > highest_round_) {
        if (open_ != 0) barrier_violations_++;
        highest_round_ = round;
      } else if (round < highest_round_) {
        barrier_violations_++;
      }
      ++open_;
      seen_.push_back(*request.observation);
    }
    std::this_thread::sleep_for(std::chrono::microseconds(200));
    std::string out = named_rule("flip_on_conflict")(request);
    std::lock_guard lock(mu_);
    --open_;
    return CompletionResult{out, 1, {}};
  }
  DecisionSource source() const override { return DecisionSource::scripted; }

  std::vector<AgentObservation> seen() const {
    std::lock_guard lock(mu_);
    return seen_;
  }
  int barrier_violations() const { return barrier_violations_; }

 private:
  mutable std::mutex mu_;
  std::size_t highest_round_ = 0;
  int open_ = 0;
  int barrier_violations_ = 0;
  std::vector<AgentObservation> seen_;
};

class GarbageBackend final : public Backend {
 public:
  CompletionResult complete(const CompletionRequest&) override { return CompletionResult{"not json", 1, {}}; }
  DecisionSource source() const override { return DecisionSource::llm; }
};

class AuthFailBackend final : public Backend {
 public:
  CompletionResult complete(const CompletionRequest&) override {
    throw TransportError(ErrorKind::auth, "HTTP 401", 1, 401);
  }
  DecisionSource source() const override { return DecisionSource::llm; }
};

}  // namespace

TEST(RunSimulation, GreedyOnUniformTriangleStaysInLockstep) {
  ExperimentConfig cfg = classical(3, PolicyId::greedy_det);
  cfg.steps = 6;
  const RunTrace trace = run_simulation(cfg, 0);
  EXPECT_EQ(trace.conflict_series().rounds, (std::vector<std::size_t>(6, 3)));
  EXPECT_EQ(trace.coloring_at(1), (std::vector<Color>{1, 1, 1}));
  EXPECT_EQ(trace.coloring_at(2), (std::vector<Color>{0, 0, 0}));
}

TEST(RunSimulation, ZeroUpdateProbabilityIsIdentity) {
  for (std::uint64_t seed : {0ULL, 1ULL, 2ULL}) {
    ExperimentConfig cfg = classical(5, PolicyId::soft_fp, RandomInit{});
    cfg.agent.p = 0.0;
    cfg.seed = seed;
    const RunTrace trace = run_simulation(cfg, 0);
    for (std::size_t t = 1; t <= cfg.steps; ++t) EXPECT_EQ(trace.coloring_at(t), trace.initial.assignment());
  }
}

TEST(RunSimulation, RandomPolicyTraceIsByteIdentical) {
  ExperimentConfig cfg = classical(5, PolicyId::random, RandomInit{});
  cfg.seed = 31;
  EXPECT_EQ(serialize_trace(run_simulation(cfg, 2)), serialize_trace(run_simulation(cfg, 2)));
}

TEST(RunSimulation, ThreadCountDoesNotChangeTheTrace) {
  for (PolicyId id : {PolicyId::soft_fp, PolicyId::conservative_random, PolicyId::random}) {
    ExperimentConfig cfg = classical(11, id, RandomInit{});
    cfg.seed = 5;
    const std::string sequential = serialize_trace(run_simulation(cfg, 0));
    cfg.worker_threads = 4;
    RunTrace threaded = run_simulation(cfg, 0);
    threaded.config.worker_threads = 1;
    EXPECT_EQ(serialize_trace(threaded), sequential) << to_string(id);
  }
}

TEST(RunSimulation, RepeatsDiffer) {
  ExperimentConfig cfg = classical(11, PolicyId::random, RandomInit{});
  EXPECT_NE(run_simulation(cfg, 0).rounds, run_simulation(cfg, 1).rounds);
}

TEST(RunSimulation, ConservationAndStoredMetrics) {
  ExperimentConfig cfg = classical(11, PolicyId::soft_cfp, RandomInit{});
  const RunTrace trace = run_simulation(cfg, 3);
  ASSERT_EQ(trace.rounds.size(), cfg.steps);
  for (const auto& r : trace.rounds) {
    ASSERT_EQ(r.coloring.size(), 11u);
    for (Color c : r.coloring) {
      EXPECT_GE(c, 0);
      EXPECT_LT(c, 2);
    }
    EXPECT_EQ(r.conflicts, conflict_report(trace.graph, Coloring(r.coloring, 2)));
  }
  EXPECT_EQ(trace.status, RunStatus::completed);
  EXPECT_EQ(*trace.metrics, compute_metrics(trace.conflict_series()));
}

TEST(RunSimulation, RandomInitResamplesAboveBest) {
  // On C3, 6 of the 8 two-colorings sit at the optimum.
  std::size_t resampled = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    ExperimentConfig cfg = classical(3, PolicyId::soft_fp, RandomInit{});
    cfg.seed = seed;
    const RunTrace trace = run_simulation(cfg, 0);
    EXPECT_EQ(trace.initial_conflicts.total, 3u);
    resampled += trace.init_attempts > 1;
  }
  EXPECT_GT(resampled, 100u);
}

TEST(RunSimulation, DegenerateFixedInit) {
  ExperimentConfig cfg = classical(5, PolicyId::soft_fp, ExplicitInit{{0, 1, 0, 1, 0}});
  try {
    run_simulation(cfg, 0);
    FAIL();
  } catch (const Error& ex) {
    EXPECT_EQ(ex.kind(), ErrorKind::degenerate_series);
  }
}

TEST(RunSimulation, ConfBestOverride) {
  ExperimentConfig cfg = classical(5, PolicyId::soft_fp);
  cfg.conf_best = 0;
  EXPECT_EQ(run_simulation(cfg, 0).conf_best, 0u);
}

TEST(RunSimulation, ProbeSeesOnlyPreviousRound) {
  ExperimentConfig cfg = scripted(11, 6);
  cfg.init = RandomInit{};
  cfg.agent.concurrency = 8;
  ProbeBackend probe;
  SimulationHooks hooks;
  hooks.backend = &probe;
  const RunTrace trace = run_simulation(cfg, 0, hooks);
  const auto seen = probe.seen();
  ASSERT_EQ(seen.size(), 11u * 6u);
  EXPECT_EQ(probe.barrier_violations(), 0);
  for (const AgentObservation& obs : seen) {
    const auto& state = trace.coloring_at(obs.round_index);
    EXPECT_EQ(obs.own_color, state[static_cast<std::size_t>(obs.node_id)]);
    for (const auto& [u, c] : obs.neighbor_colors) EXPECT_EQ(c, state[static_cast<std::size_t>(u)]);
    EXPECT_EQ(obs.own_color_history.size(), obs.round_index + 1);
  }
}

TEST(RunSimulation, ScriptedKeepOwnIsStatic) {
  ScriptedBackend backend(BackendScript{{}, named_rule("keep_own")});
  SimulationHooks hooks;
  hooks.backend = &backend;
  const RunTrace trace = run_simulation(scripted(5, 5), 0, hooks);
  for (const auto& r : trace.rounds) EXPECT_EQ(r.conflicts.total, 5u);
}

TEST(RunSimulation, ScriptedBestResponseMatchesGreedy) {
  ScriptedBackend backend(BackendScript{{}, named_rule("best_response")});
  SimulationHooks hooks;
  hooks.backend = &backend;
  const RunTrace llm = run_simulation(scripted(3, 6), 0, hooks);
  ExperimentConfig cfg = classical(3, PolicyId::greedy_det);
  cfg.steps = 6;
  const RunTrace greedy = run_simulation(cfg, 0);
  for (std::size_t t = 1; t <= 6; ++t) EXPECT_EQ(llm.coloring_at(t), greedy.coloring_at(t));
  EXPECT_EQ(llm.rounds[0].decisions[0].source, DecisionSource::scripted);
}

TEST(RunSimulation, MalformedResponsesFallBackThenAbort) {
  GarbageBackend backend;
  SimulationHooks hooks;
  hooks.backend = &backend;
  try {
    run_simulation(scripted(3, 10), 0, hooks);
    FAIL();
  } catch (const AbortedRunError& ex) {
    const RunTrace& partial = ex.partial_trace();
    EXPECT_EQ(partial.status, RunStatus::aborted);
    EXPECT_EQ(partial.rounds.size(), kMaxFailedRounds);
    for (const auto& d : partial.rounds[0].decisions) {
      EXPECT_EQ(d.source, DecisionSource::fallback);
      EXPECT_EQ(d.color, 0);
      EXPECT_EQ(d.raw_response, "not json");
      ASSERT_TRUE(d.error.has_value());
      EXPECT_EQ(d.error->rfind("parse", 0), 0u);
    }
  }
}

TEST(RunSimulation, AuthFailureAborts) {
  AuthFailBackend backend;
  SimulationHooks hooks;
  hooks.backend = &backend;
  try {
    run_simulation(scripted(3, 4), 0, hooks);
    FAIL();
  } catch (const AbortedRunError& ex) {
    EXPECT_TRUE(ex.partial_trace().rounds.empty());
    EXPECT_EQ(ex.partial_trace().abort_reason->rfind("auth", 0), 0u);
  }
}

TEST(RunSimulation, ScriptGapAborts) {
  ScriptedBackend backend(BackendScript{});
  SimulationHooks hooks;
  hooks.backend = &backend;
  EXPECT_THROW(run_simulation(scripted(3, 4), 0, hooks), AbortedRunError);
}

TEST(RunSimulation, LlmNeedsBackend) { EXPECT_THROW(run_simulation(scripted(3, 4), 0), Error); }

TEST(RunExperiment, SoftFpFiveCycleThousandRepeats) {
  for (InitMode init : {InitMode{UniformInit{0}}, InitMode{RandomInit{}}}) {
    ExperimentConfig cfg = classical(5, PolicyId::soft_fp, init);
    cfg.repeats = 1000;
    const auto result = run_experiment(cfg, ExperimentOptions{nullptr, false});
    EXPECT_GE(result.row.proximity_mean, 70.0);
    EXPECT_LE(result.row.proximity_mean, 90.0);
  }
}

TEST(RunExperiment, RandomElevenCycleThousandRepeatsUniformInit) {
  ExperimentConfig cfg = classical(11, PolicyId::random);
  cfg.repeats = 1000;
  const auto result = run_experiment(cfg, ExperimentOptions{nullptr, false});
  EXPECT_GE(result.row.proximity_mean, 40.0);
  EXPECT_LE(result.row.proximity_mean, 60.0);
}

// The engine and an independent simulator of the same rules must agree
// statistically. Tolerances allow ~4 standard errors at 2,000 repeats.
TEST(RunExperiment, AgreesWithReferenceSimulator) {
  struct Case {
    std::size_t n;
    PolicyId policy;
    oracle::RefPolicy ref;
    bool uniform;
    double tol_prox;
  };
  const std::vector<Case> cases = {
      {5, PolicyId::soft_fp, oracle::RefPolicy::soft_fp, false, 2.5},
      {11, PolicyId::soft_fp, oracle::RefPolicy::soft_fp, true, 2.5},
      {11, PolicyId::soft_cfp, oracle::RefPolicy::soft_cfp, false, 2.5},
      {5, PolicyId::conservative_random, oracle::RefPolicy::conservative_random, true, 4.0},
      {11, PolicyId::random, oracle::RefPolicy::random, false, 6.0},
      {3, PolicyId::random, oracle::RefPolicy::random, true, 4.0},
  };
  constexpr std::size_t kReps = 2000;
  for (const auto& c : cases) {
    ExperimentConfig cfg = classical(c.n, c.policy, c.uniform ? InitMode{UniformInit{0}} : InitMode{RandomInit{}});
    cfg.repeats = kReps;
    cfg.seed = 17;
    const auto row = run_experiment(cfg, ExperimentOptions{nullptr, false}).row;
    const auto ref = oracle::reference_cycle_means(c.n, c.ref, c.uniform, cfg.steps, kReps, 0.3, 99);
    EXPECT_NEAR(row.proximity_mean, ref.proximity, c.tol_prox) << "C" << c.n << " " << to_string(c.policy);
    EXPECT_NEAR(row.stability_mean, ref.stability, 2.5) << "C" << c.n << " " << to_string(c.policy);
  }
}
