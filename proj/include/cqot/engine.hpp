#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "cqot/gateway.hpp"
#include "cqot/model.hpp"
#include "cqot/prompting.hpp"
#include "cqot/verifier.hpp"

namespace cqot {

class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::string now_iso() = 0;  // UTC ISO-8601
};

class SystemClock : public Clock {
 public:
  std::string now_iso() override;
};

/// Starts at the epoch and advances one second per reading, so repeated runs
/// produce identical records.
class FixedClock : public Clock {
 public:
  std::string now_iso() override;

 private:
  std::mutex mutex_;
  long long ticks_ = 0;
};

std::string format_utc_iso(long long seconds_since_epoch);

/// Everything a run needs that is not the transport: profiles, gate policy,
/// question catalog, prompt templates, clock and hooks. Immutable after
/// construction apart from the abort flag; shareable across worker threads.
class Engine {
 public:
  /// A human decision point at the gate: inspect the verdict and the computed
  /// decision, return the decision to apply.
  using DecisionHook =
      std::function<Decision(const CqVerdict& verdict, const Decision& computed)>;

  Engine();

  /// Config JSON: {"profiles":[...], "default_profile", "policy":{...},
  /// "templates_dir", "critical_questions":[...], "clock":"system|fixed",
  /// "timeout_seconds", "retry":{...}, "verbosity_keywords":[...]}.
  /// All fields optional; omitted ones keep defaults.
  static Engine from_json_text(const std::string& config_json);

  const LoopPolicy& policy() const { return policy_; }
  const Catalog& catalog() const { return catalog_; }
  const TemplateSet& templates() const { return templates_; }
  const std::vector<ProviderProfile>& profiles() const { return profiles_; }

  /// Named profile, or the default profile when `name` is empty.
  const ProviderProfile& profile(const std::string& name = "") const;

  RetryPolicy retry() const { return retry_; }
  HttpOptions http_options() const { return http_options_; }
  const std::vector<std::string>& verbosity_keywords() const {
    return verbosity_keywords_;
  }

  std::string now_iso() const { return clock_->now_iso(); }

  /// Violations across the policy, every profile, and catalog consistency
  /// (including num_cqs matching the catalog size).
  ValidationReport validate() const;

  void set_decision_hook(DecisionHook hook) { decision_hook_ = std::move(hook); }
  const DecisionHook& decision_hook() const { return decision_hook_; }

  void request_abort() { abort_flag_->store(true); }
  void reset_abort() { abort_flag_->store(false); }
  bool abort_requested() const { return abort_flag_->load(); }

 private:
  std::vector<ProviderProfile> profiles_;
  std::string default_profile_;
  LoopPolicy policy_;
  Catalog catalog_;
  TemplateSet templates_;
  RetryPolicy retry_;
  HttpOptions http_options_;
  std::vector<std::string> verbosity_keywords_;
  std::shared_ptr<Clock> clock_;
  DecisionHook decision_hook_;
  std::shared_ptr<std::atomic<bool>> abort_flag_ =
      std::make_shared<std::atomic<bool>>(false);
};

}  // namespace cqot
