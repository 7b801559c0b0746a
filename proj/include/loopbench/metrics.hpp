// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace loopbench {

/// Conflict counts of one run: the pre-decision state, the state after
/// each of the T rounds, and the best achievable count.
struct ConflictSeries {
  std::size_t initial = 0;
  std::vector<std::size_t> rounds;
  std::size_t best = 0;
};

/// Mean normalized distance to `best` over all rounds, as a percentage
/// where 100 is "always optimal" and 0 is "never left the initial level".
/// Negative when rounds are worse than the initial state.
///
/// Throws ErrorKind::degenerate_series unless initial > best, and
/// ErrorKind::insufficient_data for an empty series.
double proximity(const ConflictSeries& s);

/// Percentage of round-to-round transitions that did not increase
/// conflicts. Only the post-decision rounds take part. Needs T >= 2.
double stability(const ConflictSeries& s);

struct RunMetrics {
  double proximity = 0.0;
  double stability = 0.0;

  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

RunMetrics compute_metrics(const ConflictSeries& s);

struct MetricsRow {
  double proximity_mean = 0.0;
  double proximity_std = 0.0;
  double stability_mean = 0.0;
  double stability_std = 0.0;
  std::size_t repeats = 0;
};

/// Means and sample (n-1) standard deviations; std is 0 for a single run.
MetricsRow aggregate(std::span<const RunMetrics> runs);

inline constexpr const char* kCsvHeader =
    "graph,agent,proximity_mean,proximity_std,stability_mean,stability_std,repeats";

/// One CSV line (no trailing newline), values fixed to one decimal.
std::string format_csv_row(const std::string& graph, const std::string& agent, const MetricsRow& row);

}  // namespace loopbench
