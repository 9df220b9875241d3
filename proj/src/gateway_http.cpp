#include <chrono>
#include <cmath>
#include <cstdlib>

#include <httplib.h>

#include "cqot/errors.hpp"
#include "cqot/gateway.hpp"
#include "cqot/json_io.hpp"

namespace cqot {

namespace {

// "https://host:port/some/path" -> ("https://host:port", "/some/path")
std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    raise(ErrorKind::ConfigError, "endpoint must include a scheme: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpBackend::HttpBackend(const ProviderProfile& profile, HttpOptions options)
    : profile_(profile), options_(options) {
  if (profile_.endpoint.empty()) {
    raise(ErrorKind::ConfigError,
          "profile '" + profile_.name + "' has no endpoint");
  }
  std::tie(base_url_, path_) = split_url(profile_.endpoint);

  if (profile_.auth_env_var.empty()) {
    raise(ErrorKind::AuthError,
          "profile '" + profile_.name + "' names no auth env var");
  }
  const char* token = std::getenv(profile_.auth_env_var.c_str());
  if (token == nullptr || *token == '\0') {
    raise(ErrorKind::AuthError,
          "auth env var " + profile_.auth_env_var + " is not set");
  }
  token_ = token;
}

ChatResponse HttpBackend::complete(const ChatRequest& request) {
  json body;
  body["model"] = request.model_id;
  json messages = json::array();
  for (const auto& message : request.messages) {
    messages.push_back(
        {{"role", to_string(message.role)}, {"content", message.content}});
  }
  body["messages"] = messages;
  body["temperature"] = request.params.temperature;
  body["top_p"] = request.params.top_p;
  body["max_tokens"] = request.params.max_new_tokens;

  httplib::Client client(base_url_);
  const auto timeout = std::chrono::duration<double>(options_.timeout_seconds);
  client.set_connection_timeout(
      std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
  client.set_read_timeout(
      std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
  client.set_write_timeout(
      std::chrono::duration_cast<std::chrono::milliseconds>(timeout));

  httplib::Headers headers = {{"Authorization", "Bearer " + token_}};

  const auto start = std::chrono::steady_clock::now();
  httplib::Result result =
      client.Post(path_, headers, body.dump(), "application/json");
  const long latency_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - start)
          .count();

  if (!result) {
    raise(ErrorKind::TransportError,
          "request to " + base_url_ + " failed: " + httplib::to_string(result.error()),
          /*transient=*/true);
  }

  const int status = result->status;
  if (status == 401 || status == 403) {
    raise(ErrorKind::AuthError,
          "provider rejected credentials (HTTP " + std::to_string(status) + ")");
  }
  if (status == 429) {
    raise(ErrorKind::RateLimited, "provider rate limit (HTTP 429)",
          /*transient=*/true);
  }
  if (status >= 500) {
    raise(ErrorKind::TransportError,
          "provider error (HTTP " + std::to_string(status) + ")",
          /*transient=*/true);
  }
  if (status != 200) {
    raise(ErrorKind::TransportError,
          "unexpected HTTP status " + std::to_string(status) + ": " +
              result->body);
  }

  json reply = json::parse(result->body, nullptr, false);
  if (reply.is_discarded()) {
    raise(ErrorKind::TransportError, "provider returned malformed JSON");
  }

  ChatResponse response;
  response.latency_ms = latency_ms;
  try {
    const json& choices = reply.at("choices");
    if (!choices.is_array() || choices.empty()) {
      raise(ErrorKind::EmptyCompletion, "provider returned no choices");
    }
    response.content =
        choices.at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    raise(ErrorKind::TransportError,
          "provider response missing choices[0].message.content");
  }
  if (response.content.empty()) {
    raise(ErrorKind::EmptyCompletion, "provider returned empty text");
  }

  if (reply.contains("usage") && reply["usage"].is_object()) {
    const json& usage = reply["usage"];
    TokenUsage tokens;
    tokens.input_tokens =
        usage.value("prompt_tokens", usage.value("input_tokens", 0L));
    tokens.output_tokens =
        usage.value("completion_tokens", usage.value("output_tokens", 0L));
    response.usage = tokens;
  }
  return response;
}

}  // namespace cqot
