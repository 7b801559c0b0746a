// SPDX-License-Identifier: Apache-2.0
#include <httplib.h>

#include "loopbench/llm_client.hpp"

namespace loopbench {

namespace {

class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(const std::string& base_url) : base_url_(base_url) {}

  HttpResponse post(const std::string& path, const std::string& body, const HttpHeaders& headers,
                    std::chrono::milliseconds timeout) override {
    // One client per call keeps concurrent requests independent.
    httplib::Client client(base_url_);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers h;
    for (const auto& [key, value] : headers) h.emplace(key, value);
    auto result = client.Post(path, h, body, "application/json");
    if (!result) return HttpResponse{0, {}, httplib::to_string(result.error())};
    return HttpResponse{result->status, result->body, {}};
  }

 private:
  std::string base_url_;
};

}  // namespace

std::unique_ptr<HttpTransport> make_http_transport(const std::string& base_url) {
  // httplib wants the origin only.
  const auto scheme = base_url.find("://");
  const auto slash = base_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  return std::make_unique<HttplibTransport>(slash == std::string::npos ? base_url : base_url.substr(0, slash));
}

}  // namespace loopbench
