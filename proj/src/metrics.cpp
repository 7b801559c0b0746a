// SPDX-License-Identifier: Apache-2.0
#include "loopbench/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "loopbench/error.hpp"

namespace loopbench {

double proximity(const ConflictSeries& s) {
  if (s.rounds.empty()) throw Error(ErrorKind::insufficient_data, "proximity needs at least one round");
  if (s.initial <= s.best) {
    throw Error(ErrorKind::degenerate_series, "conf_initial (" + std::to_string(s.initial) +
                                                  ") must exceed conf_best (" + std::to_string(s.best) + ")");
  }
  const double span = static_cast<double>(s.initial - s.best);
  double sum = 0.0;
  for (std::size_t conf : s.rounds) {
    sum += (static_cast<double>(conf) - static_cast<double>(s.best)) / span;
  }
  return 100.0 - (sum / static_cast<double>(s.rounds.size())) * 100.0;
}

double stability(const ConflictSeries& s) {
  if (s.rounds.size() < 2) throw Error(ErrorKind::insufficient_data, "stability needs at least two rounds");
  std::size_t increases = 0;
  for (std::size_t t = 0; t + 1 < s.rounds.size(); ++t) {
    if (s.rounds[t + 1] > s.rounds[t]) ++increases;
  }
  return 100.0 - (static_cast<double>(increases) / static_cast<double>(s.rounds.size() - 1)) * 100.0;
}

RunMetrics compute_metrics(const ConflictSeries& s) { return RunMetrics{proximity(s), stability(s)}; }

namespace {

void mean_and_std(std::span<const RunMetrics> runs, double RunMetrics::*field, double& mean, double& sd) {
  double sum = 0.0;
  for (const auto& r : runs) sum += r.*field;
  mean = sum / static_cast<double>(runs.size());
  if (runs.size() < 2) {
    sd = 0.0;
    return;
  }
  double sq = 0.0;
  for (const auto& r : runs) sq += (r.*field - mean) * (r.*field - mean);
  sd = std::sqrt(sq / static_cast<double>(runs.size() - 1));
}

}  // namespace

MetricsRow aggregate(std::span<const RunMetrics> runs) {
  if (runs.empty()) throw Error(ErrorKind::insufficient_data, "cannot aggregate an empty set of runs");
  MetricsRow row;
  mean_and_std(runs, &RunMetrics::proximity, row.proximity_mean, row.proximity_std);
  mean_and_std(runs, &RunMetrics::stability, row.stability_mean, row.stability_std);
  row.repeats = runs.size();
  return row;
}

std::string format_csv_row(const std::string& graph, const std::string& agent, const MetricsRow& row) {
  char buf[160];
  std::snprintf(buf, sizeof buf, ",%.1f,%.1f,%.1f,%.1f,%zu", row.proximity_mean, row.proximity_std,
                row.stability_mean, row.stability_std, row.repeats);
  return graph + "," + agent + buf;
}

}  // namespace loopbench
