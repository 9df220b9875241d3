#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "cqot/model.hpp"

namespace cqot {

enum class Role { System, User, Assistant };

const char* to_string(Role role);
Role role_from_string(const std::string& name);

struct ChatMessage {
  Role role = Role::User;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

/// Local routing metadata: identifies which pipeline step, loop iteration and
/// benchmark turn produced a request. Never serialized onto the wire; the
/// scripted backend keys its lookups on it.
struct RequestTag {
  StepKind step = StepKind::Standard;
  int iteration = 1;
  int turn = 1;

  bool operator==(const RequestTag&) const = default;
};

struct ChatRequest {
  std::string model_id;
  std::vector<ChatMessage> messages;
  SamplingParams params;
  std::optional<RequestTag> tag;

  bool operator==(const ChatRequest&) const = default;
};

struct TokenUsage {
  long input_tokens = 0;
  long output_tokens = 0;

  bool operator==(const TokenUsage&) const = default;
};

struct ChatResponse {
  std::string content;
  std::optional<TokenUsage> usage;
  long latency_ms = 0;
};

/// A chat-completion transport. Implementations raise CqotError; transient
/// failures are marked so the gateway can retry them.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
  virtual std::string name() const = 0;
};

/// Deterministic backend for tests and offline runs: complete() is a pure
/// lookup keyed on (step, iteration, turn), and every request is recorded
/// for later assertions.
class ScriptedBackend : public Backend {
 public:
  void add(StepKind step, int iteration, int turn, std::string content);

  /// Fallback used when no exact (step, iteration, turn) entry exists.
  void add_default(StepKind step, std::string content);

  /// Script JSON: {"entries":[{"step","iteration","turn","content"}],
  ///               "defaults":[{"step","content"}]}
  static std::shared_ptr<ScriptedBackend> from_json_text(const std::string& text);

  ChatResponse complete(const ChatRequest& request) override;
  std::string name() const override { return "scripted"; }

  std::vector<ChatRequest> requests() const;
  std::size_t request_count() const;

 private:
  using Key = std::tuple<StepKind, int, int>;

  mutable std::mutex mutex_;
  std::map<Key, std::string> entries_;
  std::map<StepKind, std::string> defaults_;
  std::vector<ChatRequest> log_;
};

struct HttpOptions {
  double timeout_seconds = 120.0;
};

/// Talks the normalized wire dialect: POST {model, messages, temperature,
/// top_p, max_tokens} with a bearer token, expecting
/// choices[0].message.content and optional usage in the reply.
class HttpBackend : public Backend {
 public:
  /// Resolves the bearer token from the profile's auth env var; raises
  /// AuthError when the variable is missing or empty.
  HttpBackend(const ProviderProfile& profile, HttpOptions options = {});

  ChatResponse complete(const ChatRequest& request) override;
  std::string name() const override { return "http:" + profile_.name; }

 private:
  ProviderProfile profile_;
  HttpOptions options_;
  std::string base_url_;
  std::string path_;
  std::string token_;
};

struct RetryPolicy {
  int max_attempts = 5;
  double base_delay_seconds = 1.0;
  double factor = 2.0;
};

/// Front door for all model calls: validates requests before any I/O and
/// retries transient transport failures with exponential backoff.
class Gateway {
 public:
  using Sleeper = std::function<void(double seconds)>;

  explicit Gateway(std::shared_ptr<Backend> backend, RetryPolicy retry = {},
                   Sleeper sleeper = {});

  ChatResponse complete(const ChatRequest& request);

  Backend& backend() { return *backend_; }
  std::shared_ptr<Backend> backend_ptr() const { return backend_; }

 private:
  std::shared_ptr<Backend> backend_;
  RetryPolicy retry_;
  Sleeper sleeper_;
};

/// Plan assessment, final replies and judging run on the objective profile;
/// plan sketching and baseline answers on the creative one.
SamplingParams sampling_for_step(const ProviderProfile& profile, StepKind step);

}  // namespace cqot
