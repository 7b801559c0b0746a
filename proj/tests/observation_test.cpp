// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "loopbench/error.hpp"
#include "loopbench/observation.hpp"
#include "test_support.hpp"

using namespace loopbench;
using loopbench::support::trace_from_states;

TEST(BuildObservation, InitialStateOnly) {
  const RunTrace trace = trace_from_states(make_cycle(3), 2, {{0, 0, 0}});
  const AgentObservation obs = build_observation(trace, 0, 0);
  EXPECT_EQ(obs.own_color_history, (std::vector<Color>{0}));
  EXPECT_EQ(obs.own_conflict_history, (std::vector<std::size_t>{2}));
  EXPECT_EQ(obs.current_conflicts, 2u);
  EXPECT_EQ(obs.status(), "2 CONFLICTS");
  EXPECT_EQ(obs.neighbor_ids, (std::vector<NodeId>{1, 2}));
  EXPECT_EQ(obs.available_colors, (std::vector<Color>{0, 1}));
  EXPECT_EQ(obs.colors_used_by_neighbors, (std::vector<Color>{0}));
}

TEST(BuildObservation, ColorPerformance) {
  const RunTrace trace = trace_from_states(make_cycle(3), 2, {{0, 0, 0}, {1, 0, 0}});
  const AgentObservation obs = build_observation(trace, 0, 1);
  EXPECT_EQ(obs.own_color_history, (std::vector<Color>{0, 1}));
  EXPECT_EQ(obs.own_conflict_history, (std::vector<std::size_t>{2, 0}));
  EXPECT_EQ(obs.color_performance, (std::map<Color, ColorStats>{{0, {1, 2.0}}, {1, {1, 0.0}}}));
  EXPECT_EQ(obs.status(), "CONFLICT FREE");
}

TEST(BuildObservation, RecentConflictRateUsesLastFive) {
  // Node 0 conflict history on C3: 2, 2, 0, 0, 1, 1.
  const RunTrace trace =
      trace_from_states(make_cycle(3), 2, {{0, 0, 0}, {0, 0, 0}, {0, 1, 1}, {0, 1, 1}, {0, 0, 1}, {0, 0, 1}});
  const AgentObservation obs = build_observation(trace, 0, 5);
  ASSERT_EQ(obs.own_conflict_history, (std::vector<std::size_t>{2, 2, 0, 0, 1, 1}));
  EXPECT_DOUBLE_EQ(obs.recent_conflict_rate, 0.8);
}

TEST(BuildObservation, HistoryCapKeepsNewest) {
  const RunTrace trace =
      trace_from_states(make_cycle(3), 2, {{0, 0, 0}, {0, 0, 0}, {0, 1, 1}, {0, 1, 1}, {0, 0, 1}, {0, 0, 1}});
  const AgentObservation obs = build_observation(trace, 0, 5, ObservationOptions{5, 3});
  EXPECT_EQ(obs.own_conflict_history, (std::vector<std::size_t>{0, 1, 1}));
  EXPECT_EQ(obs.neighbor_color_histories.at(1), (std::vector<Color>{1, 0, 0}));
}

TEST(BuildObservation, FutureRoundsAreInvisible) {
  const RunTrace trace = trace_from_states(make_cycle(3), 2, {{0, 0, 0}, {1, 1, 1}, {0, 1, 0}});
  const AgentObservation early = build_observation(trace, 1, 1);
  EXPECT_EQ(early.own_color_history.size(), 2u);
  EXPECT_EQ(early.neighbor_colors, (std::map<NodeId, Color>{{0, 1}, {2, 1}}));
  // Truncating the trace does not change what round 1 shows.
  RunTrace truncated = trace;
  truncated.rounds.pop_back();
  EXPECT_EQ(build_observation(truncated, 1, 1), early);
}

TEST(BuildObservation, RoundOutOfRange) {
  const RunTrace trace = trace_from_states(make_cycle(3), 2, {{0, 0, 0}, {1, 1, 1}});
  try {
    build_observation(trace, 0, 2);
    FAIL();
  } catch (const Error& ex) {
    EXPECT_EQ(ex.kind(), ErrorKind::sequencing);
  }
}

TEST(BuildObservation, LocalViewSlice) {
  const RunTrace trace = trace_from_states(make_cycle(5), 2, {{0, 1, 0, 1, 0}});
  const LocalView view = to_local_view(build_observation(trace, 4, 0));
  EXPECT_EQ(view.own_color, 0);
  EXPECT_EQ(view.neighbor_colors, (std::map<NodeId, Color>{{0, 0}, {3, 1}}));
  EXPECT_EQ(view.palette_size, 2);
  EXPECT_TRUE(view.in_conflict());
}
