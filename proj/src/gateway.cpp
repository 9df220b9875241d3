#include "cqot/gateway.hpp"

#include <chrono>
#include <thread>

#include "cqot/errors.hpp"
#include "cqot/json_io.hpp"

namespace cqot {

const char* to_string(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "unknown";
}

Role role_from_string(const std::string& name) {
  if (name == "system") return Role::System;
  if (name == "user") return Role::User;
  if (name == "assistant") return Role::Assistant;
  raise(ErrorKind::SchemaError, "unknown role: " + name);
}

SamplingParams sampling_for_step(const ProviderProfile& profile, StepKind step) {
  switch (step) {
    case StepKind::Step1:
    case StepKind::CoT:
    case StepKind::Standard:
      return profile.creative_params;
    case StepKind::Step2:
    case StepKind::Step4:
    case StepKind::JudgeTurn1:
    case StepKind::JudgeTurn2:
    case StepKind::JudgeFollowup:
      return profile.objective_params;
  }
  return profile.creative_params;
}

Gateway::Gateway(std::shared_ptr<Backend> backend, RetryPolicy retry,
                 Sleeper sleeper)
    : backend_(std::move(backend)), retry_(retry), sleeper_(std::move(sleeper)) {
  if (!backend_) raise(ErrorKind::InvalidArgument, "gateway needs a backend");
  if (!sleeper_) {
    sleeper_ = [](double seconds) {
      std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
    };
  }
}

ChatResponse Gateway::complete(const ChatRequest& request) {
  // Rejected before any I/O.
  if (request.messages.empty()) {
    raise(ErrorKind::InvalidArgument, "request has no messages");
  }
  if (request.messages.front().role == Role::Assistant) {
    raise(ErrorKind::InvalidArgument,
          "first message role must be system or user");
  }

  double delay = retry_.base_delay_seconds;
  for (int attempt = 1;; ++attempt) {
    try {
      return backend_->complete(request);
    } catch (const CqotError& error) {
      if (!error.transient() || attempt >= retry_.max_attempts) throw;
      sleeper_(delay);
      delay *= retry_.factor;
    }
  }
}

}  // namespace cqot
