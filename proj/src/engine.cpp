#include "cqot/engine.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "cqot/errors.hpp"
#include "cqot/json_io.hpp"

namespace cqot {

std::string format_utc_iso(long long seconds_since_epoch) {
  std::time_t t = static_cast<std::time_t>(seconds_since_epoch);
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm_utc.tm_year + 1900, tm_utc.tm_mon + 1, tm_utc.tm_mday,
                tm_utc.tm_hour, tm_utc.tm_min, tm_utc.tm_sec);
  return buffer;
}

std::string SystemClock::now_iso() {
  const auto now = std::chrono::system_clock::now();
  return format_utc_iso(
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
          .count());
}

std::string FixedClock::now_iso() {
  std::lock_guard<std::mutex> lock(mutex_);
  return format_utc_iso(ticks_++);
}

namespace {

ProviderProfile make_profile(const std::string& name, double creative_temp,
                             double objective_temp, double top_p,
                             int max_new_tokens) {
  ProviderProfile profile;
  profile.name = name;
  profile.creative_params = {creative_temp, top_p, max_new_tokens};
  profile.objective_params = {objective_temp, top_p, max_new_tokens};
  profile.auth_env_var = "CQOT_API_KEY";
  return profile;
}

std::vector<ProviderProfile> default_profiles() {
  // Two reference setups: self-hosted open models, and a hosted platform
  // with a larger completion budget and greedy objective decoding.
  return {make_profile("open-model", 0.8, 0.2, 0.95, 2000),
          make_profile("hosted-platform", 1.0, 0.0, 0.95, 8192)};
}

std::vector<std::string> default_verbosity_keywords() {
  return {"verbose", "verbosity", "too long", "lengthy",
          "rambling", "conciseness", "concise"};
}

}  // namespace

Engine::Engine()
    : profiles_(default_profiles()),
      default_profile_("open-model"),
      catalog_(default_catalog()),
      templates_(TemplateSet::builtin()),
      verbosity_keywords_(default_verbosity_keywords()),
      clock_(std::make_shared<SystemClock>()) {}

Engine Engine::from_json_text(const std::string& config_json) {
  Engine engine;
  if (config_json.empty()) return engine;

  json j;
  try {
    j = json::parse(config_json);
  } catch (const json::exception& error) {
    raise(ErrorKind::ConfigError, std::string("config is not valid JSON: ") +
                                      error.what());
  }
  if (!j.is_object()) raise(ErrorKind::ConfigError, "config must be a JSON object");

  try {
    if (j.contains("profiles")) {
      engine.profiles_.clear();
      for (const auto& entry : j.at("profiles")) {
        engine.profiles_.push_back(provider_profile_from_json(entry));
      }
      if (engine.profiles_.empty()) {
        raise(ErrorKind::ConfigError, "config lists no profiles");
      }
      engine.default_profile_ = engine.profiles_.front().name;
    }
    if (j.contains("default_profile")) {
      engine.default_profile_ = j.at("default_profile").get<std::string>();
    }
    if (j.contains("policy")) {
      engine.policy_ = loop_policy_from_json(j.at("policy"));
    }
    if (j.contains("critical_questions")) {
      engine.catalog_ = catalog_from_json(j.at("critical_questions"));
      // Keep the gate arithmetic in step with a substituted catalog unless
      // the policy pins num_cqs explicitly.
      if (!j.contains("policy") || !j.at("policy").contains("num_cqs")) {
        engine.policy_.num_cqs = static_cast<int>(engine.catalog_.size());
      }
    }
    if (j.contains("templates_dir")) {
      engine.templates_ =
          TemplateSet::load(j.at("templates_dir").get<std::string>());
    }
    if (j.contains("clock")) {
      const std::string kind = j.at("clock").get<std::string>();
      if (kind == "system") {
        engine.clock_ = std::make_shared<SystemClock>();
      } else if (kind == "fixed") {
        engine.clock_ = std::make_shared<FixedClock>();
      } else {
        raise(ErrorKind::ConfigError, "clock must be 'system' or 'fixed'");
      }
    }
    if (j.contains("timeout_seconds")) {
      engine.http_options_.timeout_seconds = j.at("timeout_seconds").get<double>();
    }
    if (j.contains("retry")) {
      const json& retry = j.at("retry");
      engine.retry_.max_attempts =
          retry.value("max_attempts", engine.retry_.max_attempts);
      engine.retry_.base_delay_seconds =
          retry.value("base_delay_seconds", engine.retry_.base_delay_seconds);
      engine.retry_.factor = retry.value("factor", engine.retry_.factor);
    }
    if (j.contains("verbosity_keywords")) {
      engine.verbosity_keywords_ =
          j.at("verbosity_keywords").get<std::vector<std::string>>();
    }
  } catch (const CqotError&) {
    throw;
  } catch (const json::exception& error) {
    raise(ErrorKind::ConfigError, std::string("malformed config: ") + error.what());
  }

  // Profile lookup must succeed for the configured default.
  engine.profile(engine.default_profile_);
  return engine;
}

const ProviderProfile& Engine::profile(const std::string& name) const {
  const std::string& wanted = name.empty() ? default_profile_ : name;
  for (const auto& profile : profiles_) {
    if (profile.name == wanted) return profile;
  }
  raise(ErrorKind::ConfigError, "unknown profile: " + wanted);
}

ValidationReport Engine::validate() const {
  ValidationReport report = validate_policy(policy_);
  for (const auto& profile : profiles_) {
    auto profile_report = validate_profile(profile);
    report.violations.insert(report.violations.end(),
                             profile_report.violations.begin(),
                             profile_report.violations.end());
  }
  auto catalog_report = validate_catalog(catalog_);
  report.violations.insert(report.violations.end(),
                           catalog_report.violations.begin(),
                           catalog_report.violations.end());
  if (policy_.num_cqs != static_cast<int>(catalog_.size())) {
    report.violations.push_back(
        "policy num_cqs (" + std::to_string(policy_.num_cqs) +
        ") does not match catalog size (" + std::to_string(catalog_.size()) + ")");
  }
  return report;
}

}  // namespace cqot
