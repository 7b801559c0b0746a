// SPDX-License-Identifier: Apache-2.0
#include "loopbench/trace.hpp"

#include <fstream>
#include <sstream>

#include "loopbench/error.hpp"

namespace loopbench {

using ojson = nlohmann::ordered_json;

std::string_view to_string(DecisionSource source) {
  switch (source) {
    case DecisionSource::policy: return "policy";
    case DecisionSource::llm: return "llm";
    case DecisionSource::scripted: return "scripted";
    case DecisionSource::fallback: return "fallback";
  }
  return "unknown";
}

std::optional<DecisionSource> parse_decision_source(std::string_view text) {
  for (auto s : {DecisionSource::policy, DecisionSource::llm, DecisionSource::scripted, DecisionSource::fallback}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

const std::vector<Color>& RunTrace::coloring_at(std::size_t round) const {
  if (round == 0) return initial.assignment();
  if (round > rounds.size()) throw Error(ErrorKind::sequencing, "round " + std::to_string(round) + " not recorded");
  return rounds[round - 1].coloring;
}

const ConflictReport& RunTrace::conflicts_at(std::size_t round) const {
  if (round == 0) return initial_conflicts;
  if (round > rounds.size()) throw Error(ErrorKind::sequencing, "round " + std::to_string(round) + " not recorded");
  return rounds[round - 1].conflicts;
}

ConflictSeries RunTrace::conflict_series() const {
  ConflictSeries s{initial_conflicts.total, {}, conf_best};
  s.rounds.reserve(rounds.size());
  for (const auto& r : rounds) s.rounds.push_back(r.conflicts.total);
  return s;
}

namespace {

std::string_view status_name(RunStatus status) {
  switch (status) {
    case RunStatus::running: return "running";
    case RunStatus::completed: return "completed";
    case RunStatus::aborted: return "aborted";
  }
  return "unknown";
}

ojson conflicts_to_json(const ConflictReport& r) { return {{"total", r.total}, {"per_node", r.per_node}}; }

ConflictReport conflicts_from_json(const ojson& j) {
  return ConflictReport{j.at("total").get<std::size_t>(), j.at("per_node").get<std::vector<std::size_t>>()};
}

ojson decision_to_json(const NodeDecision& d) {
  ojson j = {{"node", d.node}, {"color", d.color}, {"strategy", d.strategy}, {"source", to_string(d.source)}};
  if (d.attempts != 0) j["attempts"] = d.attempts;
  if (d.raw_response) j["raw_response"] = *d.raw_response;
  if (d.error) j["error"] = *d.error;
  if (d.system_prompt) j["system_prompt"] = *d.system_prompt;
  if (d.user_prompt) j["user_prompt"] = *d.user_prompt;
  if (d.request_log) j["request"] = *d.request_log;
  return j;
}

NodeDecision decision_from_json(const ojson& j) {
  NodeDecision d;
  d.node = j.at("node").get<NodeId>();
  d.color = j.at("color").get<Color>();
  d.strategy = j.at("strategy").get<std::string>();
  auto source = parse_decision_source(j.at("source").get<std::string>());
  if (!source) throw Error(ErrorKind::format, "unknown decision source");
  d.source = *source;
  if (j.contains("attempts")) d.attempts = j["attempts"].get<int>();
  if (j.contains("raw_response")) d.raw_response = j["raw_response"].get<std::string>();
  if (j.contains("error")) d.error = j["error"].get<std::string>();
  if (j.contains("system_prompt")) d.system_prompt = j["system_prompt"].get<std::string>();
  if (j.contains("user_prompt")) d.user_prompt = j["user_prompt"].get<std::string>();
  if (j.contains("request")) d.request_log = j["request"];
  return d;
}

}  // namespace

std::string serialize_trace(const RunTrace& trace) {
  std::string out;
  ojson injected = ojson::object();
  for (const auto& [node, text] : trace.injected_notes) injected[std::to_string(node)] = text;
  ojson header = {
      {"format", "loopbench-trace"},
      {"version", kTraceFormatVersion},
      {"config", config_to_json(trace.config)},
      {"repeat_index", trace.repeat_index},
      {"run_seed", trace.run_seed},
      {"init_attempts", trace.init_attempts},
      {"graph", graph_to_json(trace.graph)},
      {"palette_size", trace.initial.palette_size()},
      {"conf_best", trace.conf_best},
      {"initial_coloring", trace.initial.assignment()},
      {"initial_conflicts", conflicts_to_json(trace.initial_conflicts)},
      {"injected_notes", std::move(injected)},
  };
  out += header.dump();
  out += '\n';

  for (const RoundRecord& r : trace.rounds) {
    ojson decisions = ojson::array();
    for (const auto& d : r.decisions) decisions.push_back(decision_to_json(d));
    ojson line = {{"round", r.round},
                  {"coloring", r.coloring},
                  {"conflicts", conflicts_to_json(r.conflicts)},
                  {"decisions", std::move(decisions)}};
    if (r.elapsed_ms) line["elapsed_ms"] = *r.elapsed_ms;
    out += line.dump();
    out += '\n';
  }

  if (trace.status != RunStatus::running) {
    ojson footer = {{"status", status_name(trace.status)}};
    if (trace.metrics) {
      footer["metrics"] = {{"proximity", trace.metrics->proximity}, {"stability", trace.metrics->stability}};
    }
    if (trace.abort_reason) footer["reason"] = *trace.abort_reason;
    out += footer.dump();
    out += '\n';
  }
  return out;
}

RunTrace parse_trace(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    if (nl == std::string_view::npos) {
      // A final line without its newline is an interrupted write.
      throw Error(ErrorKind::format, "trace is truncated (last line incomplete)");
    }
    lines.push_back(text.substr(0, nl));
    text.remove_prefix(nl + 1);
  }
  if (lines.empty()) throw Error(ErrorKind::format, "trace is empty");

  RunTrace trace;
  std::size_t line_no = 0;
  try {
    const ojson header = ojson::parse(lines[0]);
    if (header.value("format", std::string()) != "loopbench-trace") {
      throw Error(ErrorKind::format, "not a loopbench trace");
    }
    const int version = header.at("version").get<int>();
    if (version != kTraceFormatVersion) {
      throw Error(ErrorKind::format, "trace format version " + std::to_string(version) +
                                         " is not supported (expected version " +
                                         std::to_string(kTraceFormatVersion) + ")");
    }
    trace.config = config_from_json(header.at("config"));
    trace.repeat_index = header.at("repeat_index").get<std::size_t>();
    trace.run_seed = header.at("run_seed").get<std::uint64_t>();
    trace.init_attempts = header.at("init_attempts").get<std::size_t>();
    trace.graph = graph_from_json(header.at("graph"));
    trace.conf_best = header.at("conf_best").get<std::size_t>();
    trace.initial = Coloring(header.at("initial_coloring").get<std::vector<Color>>(),
                             header.at("palette_size").get<int>());
    trace.initial_conflicts = conflicts_from_json(header.at("initial_conflicts"));
    for (const auto& [key, value] : header.at("injected_notes").items()) {
      trace.injected_notes[std::stoi(key)] = value.get<std::string>();
    }

    bool closed = false;
    for (line_no = 1; line_no < lines.size(); ++line_no) {
      if (closed) throw Error(ErrorKind::format, "content after the closing status line");
      const ojson j = ojson::parse(lines[line_no]);
      if (j.contains("status")) {
        const auto status = j["status"].get<std::string>();
        if (status == "completed") {
          trace.status = RunStatus::completed;
        } else if (status == "aborted") {
          trace.status = RunStatus::aborted;
        } else {
          throw Error(ErrorKind::format, "unknown run status '" + status + "'");
        }
        if (j.contains("metrics")) {
          trace.metrics = RunMetrics{j["metrics"].at("proximity").get<double>(),
                                     j["metrics"].at("stability").get<double>()};
        }
        if (j.contains("reason")) trace.abort_reason = j["reason"].get<std::string>();
        closed = true;
        continue;
      }
      RoundRecord r;
      r.round = j.at("round").get<std::size_t>();
      if (r.round != trace.rounds.size() + 1) throw Error(ErrorKind::format, "rounds are not contiguous");
      r.coloring = j.at("coloring").get<std::vector<Color>>();
      r.conflicts = conflicts_from_json(j.at("conflicts"));
      for (const auto& d : j.at("decisions")) r.decisions.push_back(decision_from_json(d));
      if (j.contains("elapsed_ms")) r.elapsed_ms = j["elapsed_ms"].get<double>();
      trace.rounds.push_back(std::move(r));
    }
    if (!closed) throw Error(ErrorKind::format, "trace is truncated (no closing status line)");
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::format, "malformed trace line " + std::to_string(line_no + 1) + ": " + ex.what());
  }
  return trace;
}

void persist_trace(const RunTrace& trace, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::format, "cannot write trace to " + path.string());
  out << serialize_trace(trace);
  if (!out) throw Error(ErrorKind::format, "failed writing trace to " + path.string());
}

RunTrace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::format, "cannot open trace " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_trace(buffer.str());
}

}  // namespace loopbench
