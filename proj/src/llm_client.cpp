// SPDX-License-Identifier: Apache-2.0
#include "loopbench/llm_client.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "loopbench/error.hpp"
#include "loopbench/policies.hpp"

namespace loopbench {

using ojson = nlohmann::ordered_json;

std::string make_response(Color color, std::string_view strategy) {
  return ojson{{"color", color}, {"strategy", strategy}}.dump();
}

namespace {

const AgentObservation& require_observation(const CompletionRequest& request, std::string_view rule) {
  if (!request.observation) {
    throw Error(ErrorKind::script_gap, "rule '" + std::string(rule) + "' needs the structured observation");
  }
  return *request.observation;
}

}  // namespace

ScriptRule named_rule(std::string_view name) {
  if (name == "keep_own") {
    return [](const CompletionRequest& r) {
      return make_response(require_observation(r, "keep_own").own_color, "[SAME] keep current color");
    };
  }
  if (name == "best_response") {
    return [](const CompletionRequest& r) {
      const auto view = to_local_view(require_observation(r, "best_response"));
      return make_response(decide_greedy_deterministic(view),
                           "[NEW] pick the color least used by neighbors, lowest index on ties");
    };
  }
  if (name == "flip_on_conflict") {
    return [](const CompletionRequest& r) {
      const auto& obs = require_observation(r, "flip_on_conflict");
      if (obs.current_conflicts == 0) return make_response(obs.own_color, "[SAME] hold while conflict free");
      const auto next = static_cast<Color>((obs.own_color + 1) % static_cast<Color>(obs.available_colors.size()));
      return make_response(next, "[NEW] switch color when in conflict");
    };
  }
  throw Error(ErrorKind::config, "unknown script rule '" + std::string(name) + "'");
}

BackendScript parse_script(std::string_view json_text) {
  ojson doc;
  try {
    doc = ojson::parse(json_text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw Error(ErrorKind::format, std::string("script is not JSON: ") + ex.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::format, "script must be a JSON object");
  BackendScript script;
  for (const auto& [key, value] : doc.items()) {
    if (key == "default") {
      if (!value.is_string()) throw Error(ErrorKind::format, "script 'default' must name a rule");
      script.default_rule = named_rule(value.get<std::string>());
      continue;
    }
    const auto colon = key.find(':');
    int node = -1;
    long long round = -1;
    try {
      if (colon == std::string::npos) throw std::invalid_argument("no colon");
      std::size_t used_node = 0;
      std::size_t used_round = 0;
      node = std::stoi(key.substr(0, colon), &used_node);
      round = std::stoll(key.substr(colon + 1), &used_round);
      if (used_node != colon || used_round != key.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorKind::format, "script key '" + key + "' is not of the form node:round");
    }
    if (node < 0 || round < 0) throw Error(ErrorKind::format, "script key '" + key + "' is negative");
    script.responses[{node, static_cast<std::size_t>(round)}] = value.is_string() ? value.get<std::string>() : value.dump();
  }
  return script;
}

BackendScript load_script(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::config, "cannot open script file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_script(buffer.str());
}

CompletionResult ScriptedBackend::complete(const CompletionRequest& request) {
  const auto key = std::make_pair(request.metadata.node, request.metadata.round);
  if (auto it = script_.responses.find(key); it != script_.responses.end()) return CompletionResult{it->second, 1, {}};
  if (script_.default_rule) return CompletionResult{script_.default_rule(request), 1, {}};
  throw Error(ErrorKind::script_gap, "script has no response for node " + std::to_string(key.first) + " round " +
                                         std::to_string(key.second) + " and no default rule");
}

ApiSettings settings_from_environment() {
  const char* base = std::getenv(kApiBaseEnv);
  const char* key = std::getenv(kApiKeyEnv);
  if (base == nullptr || *base == '\0') throw Error(ErrorKind::config, std::string(kApiBaseEnv) + " is not set");
  if (key == nullptr || *key == '\0') throw Error(ErrorKind::config, std::string(kApiKeyEnv) + " is not set");
  return ApiSettings{base, key, {}};
}

std::string redact(std::string_view text, std::string_view secret) {
  std::string out(text);
  if (secret.empty()) return out;
  for (auto pos = out.find(secret); pos != std::string::npos; pos = out.find(secret, pos)) {
    out.replace(pos, secret.size(), "***");
    pos += 3;
  }
  return out;
}

ChatCompletionsBackend::ChatCompletionsBackend(ApiSettings settings, std::unique_ptr<HttpTransport> transport,
                                               Sleeper sleeper)
    : settings_(std::move(settings)), transport_(std::move(transport)), sleeper_(std::move(sleeper)) {
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  // Split "scheme://host[:port]/prefix"; the prefix may already end in /v1.
  std::string base = settings_.api_base;
  while (!base.empty() && base.back() == '/') base.pop_back();
  const auto scheme = base.find("://");
  const auto slash = base.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  origin_ = slash == std::string::npos ? base : base.substr(0, slash);
  std::string prefix = slash == std::string::npos ? "" : base.substr(slash);
  if (!prefix.ends_with("/v1")) prefix += "/v1";
  path_ = prefix + "/chat/completions";
}

ojson ChatCompletionsBackend::request_body(const CompletionRequest& request) const {
  ojson body = {
      {"model", request.model},
      {"messages",
       {{{"role", "system"}, {"content", request.system_text}}, {{"role", "user"}, {"content", request.user_text}}}},
      {"temperature", request.temperature},
      {"response_format",
       {{"type", "json_schema"},
        {"json_schema", {{"name", "node_decision"}, {"strict", true}, {"schema", request.response_schema}}}}},
  };
  for (const auto& [key, value] : request.params) {
    // Numbers, booleans and objects pass through typed; anything else as a string.
    ojson parsed = ojson::parse(value, nullptr, /*allow_exceptions=*/false);
    body[key] = parsed.is_discarded() ? ojson(value) : parsed;
  }
  return body;
}

ojson ChatCompletionsBackend::request_log(const ojson& body) const {
  return {{"url", origin_ + path_},
          {"headers", {{"Authorization", "Bearer ***"}, {"Content-Type", "application/json"}}},
          {"body", body}};
}

CompletionResult ChatCompletionsBackend::complete(const CompletionRequest& request) {
  const ojson body = request_body(request);
  const std::string payload = body.dump();
  const HttpHeaders headers = {{"Authorization", "Bearer " + settings_.api_key}};

  int attempts = 0;
  int retries = 0;
  bool empty_retry_used = false;
  std::string last_error;
  int last_status = 0;

  auto backoff = [&] {
    const double factor = std::pow(settings_.retry.backoff_factor, retries);
    sleeper_(std::chrono::milliseconds(static_cast<long long>(settings_.retry.backoff_base.count() * factor)));
    ++retries;
  };

  while (true) {
    ++attempts;
    HttpResponse response = transport_->post(path_, payload, headers, request.timeout);
    last_status = response.status;

    if (response.status == 401 || response.status == 403) {
      throw TransportError(ErrorKind::auth,
                           "authentication failed (HTTP " + std::to_string(response.status) + "): " +
                               redact(response.body, settings_.api_key),
                           attempts, response.status);
    }

    bool retriable = false;
    if (response.status == 0) {
      last_error = "no response: " + redact(response.error, settings_.api_key);
      retriable = true;
    } else if (response.status == 408 || response.status == 429 || response.status >= 500) {
      last_error = "HTTP " + std::to_string(response.status);
      retriable = true;
    } else if (response.status < 200 || response.status >= 300) {
      throw TransportError(ErrorKind::transport,
                           "HTTP " + std::to_string(response.status) + ": " + redact(response.body, settings_.api_key),
                           attempts, response.status);
    } else {
      const ojson doc = ojson::parse(response.body, nullptr, /*allow_exceptions=*/false);
      const ojson* message = nullptr;
      if (doc.is_object() && doc.contains("choices") && doc["choices"].is_array() && !doc["choices"].empty() &&
          doc["choices"][0].contains("message")) {
        message = &doc["choices"][0]["message"];
      }
      if (message == nullptr) {
        last_error = "malformed completion body";
        retriable = true;
      } else if (message->contains("content") && (*message)["content"].is_string() &&
                 !(*message)["content"].get<std::string>().empty()) {
        return CompletionResult{(*message)["content"].get<std::string>(), attempts, request_log(body)};
      } else {
        last_error = message->contains("refusal") && (*message)["refusal"].is_string()
                         ? "model refused: " + (*message)["refusal"].get<std::string>()
                         : "empty message content";
        if (empty_retry_used) throw TransportError(ErrorKind::transport, last_error, attempts, response.status);
        empty_retry_used = true;
        backoff();
        continue;
      }
    }

    if (retriable && retries < settings_.retry.max_retries) {
      backoff();
      continue;
    }
    throw TransportError(ErrorKind::transport,
                         "giving up after " + std::to_string(attempts) + " attempts: " + last_error, attempts,
                         last_status);
  }
}

}  // namespace loopbench
