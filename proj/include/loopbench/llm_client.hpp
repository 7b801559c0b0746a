// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "loopbench/observation.hpp"
#include "loopbench/trace.hpp"

namespace loopbench {

struct RequestMetadata {
  std::string run_id;
  NodeId node = 0;
  std::size_t round = 0;  // prompt round, 0-based
};

struct CompletionRequest {
  std::string model;
  std::string system_text;
  std::string user_text;
  double temperature = 1.0;
  nlohmann::ordered_json response_schema;
  std::chrono::milliseconds timeout{120'000};
  /// Provider-specific knobs copied into the request body verbatim.
  std::map<std::string, std::string> params;
  RequestMetadata metadata;
  /// Structured copy of what the prompt shows. Never sent anywhere; lets
  /// offline backends implement state-dependent rules.
  std::optional<AgentObservation> observation;
};

struct CompletionResult {
  std::string content;
  int attempts = 1;
  std::optional<nlohmann::ordered_json> request_log;
};

class Backend {
 public:
  virtual ~Backend() = default;
  /// Must be safe to call concurrently from several threads.
  virtual CompletionResult complete(const CompletionRequest& request) = 0;
  virtual DecisionSource source() const = 0;
};

// ---- scripted backend ----------------------------------------------------

using ScriptRule = std::function<std::string(const CompletionRequest&)>;

struct BackendScript {
  /// (node, prompt round) -> response bytes.
  std::map<std::pair<NodeId, std::size_t>, std::string> responses;
  /// Used for pairs without a canned response; may be empty.
  ScriptRule default_rule;
};

/// `{"color": c, "strategy": text}` as a compact JSON string.
std::string make_response(Color color, std::string_view strategy);

/// Built-in default rules: "keep_own", "best_response" (lowest-index best
/// response) and "flip_on_conflict" (move to the next color when in
/// conflict). Throws ErrorKind::config for unknown names.
ScriptRule named_rule(std::string_view name);

/// Script file: JSON object mapping "node:round" to a response object (or
/// a raw string, sent as-is). The optional key "default" names a rule.
BackendScript parse_script(std::string_view json_text);
BackendScript load_script(const std::filesystem::path& path);

class ScriptedBackend final : public Backend {
 public:
  explicit ScriptedBackend(BackendScript script) : script_(std::move(script)) {}

  /// Throws ErrorKind::script_gap for an uncovered pair without a default.
  CompletionResult complete(const CompletionRequest& request) override;
  DecisionSource source() const override { return DecisionSource::scripted; }

 private:
  BackendScript script_;
};

// ---- OpenAI-compatible HTTP backend --------------------------------------

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
  int status = 0;  // 0 means no response (connection failure, timeout)
  std::string body;
  std::string error;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const std::string& path, const std::string& body, const HttpHeaders& headers,
                            std::chrono::milliseconds timeout) = 0;
};

/// cpp-httplib transport for `base_url` (scheme://host[:port]).
std::unique_ptr<HttpTransport> make_http_transport(const std::string& base_url);

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{1000};
  double backoff_factor = 2.0;
};

struct ApiSettings {
  std::string api_base;  // e.g. https://api.openai.com or https://host/v1
  std::string api_key;
  RetryPolicy retry;
};

inline constexpr const char* kApiBaseEnv = "LOOPBENCH_API_BASE";
inline constexpr const char* kApiKeyEnv = "LOOPBENCH_API_KEY";

/// Reads LOOPBENCH_API_BASE and LOOPBENCH_API_KEY. Throws ErrorKind::config
/// when either is missing.
ApiSettings settings_from_environment();

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Replaces every occurrence of `secret` in `text`.
std::string redact(std::string_view text, std::string_view secret);

class ChatCompletionsBackend final : public Backend {
 public:
  ChatCompletionsBackend(ApiSettings settings, std::unique_ptr<HttpTransport> transport, Sleeper sleeper = {});

  /// Retries 408/429/5xx and transport failures up to max_retries times
  /// with exponential backoff, and an empty or refused message once.
  /// 401/403 fail immediately with ErrorKind::auth.
  CompletionResult complete(const CompletionRequest& request) override;
  DecisionSource source() const override { return DecisionSource::llm; }

  nlohmann::ordered_json request_body(const CompletionRequest& request) const;
  const std::string& endpoint_path() const noexcept { return path_; }

 private:
  nlohmann::ordered_json request_log(const nlohmann::ordered_json& body) const;

  ApiSettings settings_;
  std::unique_ptr<HttpTransport> transport_;
  Sleeper sleeper_;
  std::string origin_;
  std::string path_;
};

}  // namespace loopbench
