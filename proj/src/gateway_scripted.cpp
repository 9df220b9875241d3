#include <sstream>

#include "cqot/errors.hpp"
#include "cqot/gateway.hpp"
#include "cqot/json_io.hpp"

namespace cqot {

void ScriptedBackend::add(StepKind step, int iteration, int turn,
                          std::string content) {
  std::lock_guard<std::mutex> lock(mutex_);
  entries_[{step, iteration, turn}] = std::move(content);
}

void ScriptedBackend::add_default(StepKind step, std::string content) {
  std::lock_guard<std::mutex> lock(mutex_);
  defaults_[step] = std::move(content);
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_json_text(
    const std::string& text) {
  json j = parse_json_object(text, "script");
  auto backend = std::make_shared<ScriptedBackend>();
  if (j.contains("entries")) {
    for (const auto& entry : j.at("entries")) {
      backend->add(step_from_string(entry.at("step").get<std::string>()),
                   entry.value("iteration", 1), entry.value("turn", 1),
                   entry.at("content").get<std::string>());
    }
  }
  if (j.contains("defaults")) {
    for (const auto& entry : j.at("defaults")) {
      backend->add_default(step_from_string(entry.at("step").get<std::string>()),
                           entry.at("content").get<std::string>());
    }
  }
  return backend;
}

ChatResponse ScriptedBackend::complete(const ChatRequest& request) {
  if (!request.tag.has_value()) {
    raise(ErrorKind::InvalidArgument,
          "scripted backend needs tagged requests for routing");
  }
  std::lock_guard<std::mutex> lock(mutex_);
  log_.push_back(request);

  const RequestTag& tag = *request.tag;
  auto it = entries_.find({tag.step, tag.iteration, tag.turn});
  if (it != entries_.end()) return {it->second, std::nullopt, 0};

  auto fallback = defaults_.find(tag.step);
  if (fallback != defaults_.end()) return {fallback->second, std::nullopt, 0};

  std::ostringstream oss;
  oss << "no scripted entry for (" << to_string(tag.step) << ", iteration "
      << tag.iteration << ", turn " << tag.turn << ")";
  raise(ErrorKind::EmptyCompletion, oss.str());
}

std::vector<ChatRequest> ScriptedBackend::requests() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return log_;
}

std::size_t ScriptedBackend::request_count() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return log_.size();
}

}  // namespace cqot
