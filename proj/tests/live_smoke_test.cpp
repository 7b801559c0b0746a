// SPDX-License-Identifier: Apache-2.0
// Talks to a real endpoint. Runs only with LOOPBENCH_LIVE_TEST=1 plus
// LOOPBENCH_API_BASE, LOOPBENCH_API_KEY and LOOPBENCH_LIVE_MODEL.
#include <gtest/gtest.h>

#include <cstdlib>

#include "loopbench/experiment.hpp"
#include "loopbench/llm_client.hpp"
#include "loopbench/simulation.hpp"

using namespace loopbench;

TEST(LiveSmoke, TwoRoundsOnTriangle) {
  const char* enabled = std::getenv("LOOPBENCH_LIVE_TEST");
  const char* model = std::getenv("LOOPBENCH_LIVE_MODEL");
  if (enabled == nullptr || std::string(enabled) != "1" || model == nullptr) {
    GTEST_SKIP() << "set LOOPBENCH_LIVE_TEST=1 and LOOPBENCH_LIVE_MODEL to run";
  }
  ExperimentConfig cfg;
  cfg.n = 3;
  cfg.steps = 2;
  cfg.agent.policy = PolicyId::llm;
  cfg.agent.model = model;
  cfg.log_prompts = true;
  auto backend = make_backend(cfg);
  SimulationHooks hooks;
  hooks.backend = backend.get();
  const RunTrace trace = run_simulation(cfg, 0, hooks);
  ASSERT_EQ(trace.rounds.size(), 2u);
  for (const auto& d : trace.rounds[0].decisions) {
    EXPECT_TRUE(d.source == DecisionSource::llm || d.source == DecisionSource::fallback);
    ASSERT_TRUE(d.request_log.has_value() || d.source == DecisionSource::fallback);
    if (d.request_log) {
      EXPECT_EQ(d.request_log->dump().find(std::getenv(kApiKeyEnv)), std::string::npos);
    }
  }
}
