#include "cqot/model.hpp"

#include <cmath>
#include <sstream>

#include "cqot/errors.hpp"

namespace cqot {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::EmptyQuery: return "empty_query";
    case ErrorKind::EmptyPlan: return "empty_plan";
    case ErrorKind::EmptyAnswer: return "empty_answer";
    case ErrorKind::MissingFirstTurn: return "missing_first_turn";
    case ErrorKind::OutOfRange: return "out_of_range";
    case ErrorKind::ConfigError: return "config_error";
    case ErrorKind::AuthError: return "auth_error";
    case ErrorKind::RateLimited: return "rate_limited";
    case ErrorKind::TransportError: return "transport_error";
    case ErrorKind::EmptyCompletion: return "empty_completion";
    case ErrorKind::NoScoreFound: return "no_score_found";
    case ErrorKind::SchemaError: return "schema_error";
    case ErrorKind::DuplicateId: return "duplicate_id";
    case ErrorKind::EmptyInput: return "empty_input";
    case ErrorKind::NonpositiveBase: return "nonpositive_base";
    case ErrorKind::InsufficientSamples: return "insufficient_samples";
    case ErrorKind::EmptyStore: return "empty_store";
    case ErrorKind::StoreConflict: return "store_conflict";
    case ErrorKind::IoError: return "io_error";
    case ErrorKind::Aborted: return "aborted";
  }
  return "unknown";
}

const char* to_string(ToulminElement element) {
  switch (element) {
    case ToulminElement::Claim: return "claim";
    case ToulminElement::Qualifier: return "qualifier";
    case ToulminElement::Data: return "data";
    case ToulminElement::Warrant: return "warrant";
    case ToulminElement::Rebuttal: return "rebuttal";
    case ToulminElement::Backing: return "backing";
  }
  return "unknown";
}

ToulminElement toulmin_from_string(const std::string& name) {
  if (name == "claim") return ToulminElement::Claim;
  if (name == "qualifier") return ToulminElement::Qualifier;
  if (name == "data") return ToulminElement::Data;
  if (name == "warrant") return ToulminElement::Warrant;
  if (name == "rebuttal") return ToulminElement::Rebuttal;
  if (name == "backing") return ToulminElement::Backing;
  raise(ErrorKind::SchemaError, "unknown toulmin element: " + name);
}

const Catalog& default_catalog() {
  static const Catalog catalog = {
      {1, "Does the reasoning process start with clearly defined premises?",
       {ToulminElement::Data}},
      {2, "Are the premises supported by evidence or accepted facts?",
       {ToulminElement::Data}},
      {3,
       "Does the reasoning process use logical connections between premises "
       "and conclusions?",
       {ToulminElement::Warrant}},
      {4, "Are the logical connections used in the reasoning process valid?",
       {ToulminElement::Warrant}},
      {5, "Does the reasoning process avoid fallacies or logical errors?",
       {ToulminElement::Warrant, ToulminElement::Backing}},
      {6, "Is the conclusion logically derived from the premises?",
       {ToulminElement::Claim}},
      {7,
       "Is the reasoning process consistent with established knowledge or "
       "principles?",
       {ToulminElement::Backing}},
      {8,
       "Does the reasoning process lead to a conclusion that is plausible "
       "and reasonable?",
       {ToulminElement::Claim, ToulminElement::Qualifier,
        ToulminElement::Rebuttal}},
  };
  return catalog;
}

const char* to_string(TechniqueMode mode) {
  switch (mode) {
    case TechniqueMode::Standard: return "standard";
    case TechniqueMode::CoT: return "cot";
    case TechniqueMode::Step1_4: return "step1_4";
    case TechniqueMode::CQoT: return "cqot";
  }
  return "unknown";
}

TechniqueMode mode_from_string(const std::string& name) {
  if (name == "standard") return TechniqueMode::Standard;
  if (name == "cot") return TechniqueMode::CoT;
  if (name == "step1_4") return TechniqueMode::Step1_4;
  if (name == "cqot") return TechniqueMode::CQoT;
  raise(ErrorKind::SchemaError, "unknown technique mode: " + name);
}

const char* to_string(StepKind step) {
  switch (step) {
    case StepKind::Standard: return "standard";
    case StepKind::CoT: return "cot";
    case StepKind::Step1: return "step1";
    case StepKind::Step2: return "step2";
    case StepKind::Step4: return "step4";
    case StepKind::JudgeTurn1: return "judge_turn1";
    case StepKind::JudgeTurn2: return "judge_turn2";
    case StepKind::JudgeFollowup: return "judge_followup";
  }
  return "unknown";
}

StepKind step_from_string(const std::string& name) {
  if (name == "standard") return StepKind::Standard;
  if (name == "cot") return StepKind::CoT;
  if (name == "step1") return StepKind::Step1;
  if (name == "step2") return StepKind::Step2;
  if (name == "step4") return StepKind::Step4;
  if (name == "judge_turn1") return StepKind::JudgeTurn1;
  if (name == "judge_turn2") return StepKind::JudgeTurn2;
  if (name == "judge_followup") return StepKind::JudgeFollowup;
  raise(ErrorKind::SchemaError, "unknown step kind: " + name);
}

const char* to_string(Category category) {
  switch (category) {
    case Category::Reasoning: return "reasoning";
    case Category::Math: return "math";
    case Category::Writing: return "writing";
    case Category::Roleplay: return "roleplay";
    case Category::Coding: return "coding";
    case Category::Extraction: return "extraction";
    case Category::Stem: return "stem";
    case Category::Humanities: return "humanities";
  }
  return "unknown";
}

Category category_from_string(const std::string& name) {
  if (name == "reasoning") return Category::Reasoning;
  if (name == "math") return Category::Math;
  if (name == "writing") return Category::Writing;
  if (name == "roleplay") return Category::Roleplay;
  if (name == "coding") return Category::Coding;
  if (name == "extraction") return Category::Extraction;
  if (name == "stem") return Category::Stem;
  if (name == "humanities") return Category::Humanities;
  raise(ErrorKind::SchemaError, "unknown category: " + name);
}

namespace {

void check_sampling(const SamplingParams& params, const std::string& label,
                    std::vector<std::string>& out) {
  if (!std::isfinite(params.temperature) || params.temperature < 0.0) {
    out.push_back(label + ": temperature must be finite and >= 0");
  }
  if (!std::isfinite(params.top_p) || params.top_p <= 0.0 || params.top_p > 1.0) {
    out.push_back(label + ": top_p must be in (0,1]");
  }
  if (params.max_new_tokens < 1) {
    out.push_back(label + ": max_new_tokens must be >= 1");
  }
}

}  // namespace

ValidationReport validate_policy(const LoopPolicy& policy) {
  ValidationReport report;
  auto& v = report.violations;
  if (policy.num_cqs < 1) v.push_back("num_cqs must be >= 1");
  if (policy.late_threshold <= 0) v.push_back("late_threshold must be > 0");
  if (policy.late_threshold > policy.early_threshold) {
    v.push_back("late_threshold exceeds early_threshold");
  }
  if (policy.early_threshold > policy.num_cqs) {
    v.push_back("early_threshold exceeds num_cqs");
  }
  if (policy.late_threshold > policy.num_cqs) {
    v.push_back("late_threshold exceeds num_cqs");
  }
  if (policy.early_max_iterations <= 0) {
    v.push_back("early_max_iterations must be > 0");
  }
  if (policy.early_max_iterations > policy.total_max_iterations) {
    v.push_back("early_max_iterations exceeds total_max_iterations");
  }
  return report;
}

ValidationReport validate_profile(const ProviderProfile& profile) {
  ValidationReport report;
  auto& v = report.violations;
  const std::string label =
      profile.name.empty() ? std::string("profile") : "profile " + profile.name;
  if (profile.name.empty()) v.push_back("profile name must be non-empty");
  check_sampling(profile.creative_params, label + " creative_params", v);
  check_sampling(profile.objective_params, label + " objective_params", v);
  if (profile.objective_params.temperature > profile.creative_params.temperature) {
    v.push_back(label + ": objective temperature exceeds creative temperature");
  }
  return report;
}

ValidationReport validate_catalog(const Catalog& catalog) {
  ValidationReport report;
  auto& v = report.violations;
  if (catalog.empty()) {
    v.push_back("catalog must contain at least one question");
    return report;
  }
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const auto& q = catalog[i];
    if (q.index != static_cast<int>(i) + 1) {
      std::ostringstream oss;
      oss << "catalog indices must be contiguous from 1 (position " << i + 1
          << " has index " << q.index << ")";
      v.push_back(oss.str());
    }
    if (q.text.find_first_not_of(" \t\r\n") == std::string::npos) {
      v.push_back("catalog question " + std::to_string(i + 1) + " has empty text");
    }
  }
  return report;
}

ValidationReport validate_config(const ProviderProfile& profile,
                                 const LoopPolicy& policy) {
  ValidationReport report = validate_profile(profile);
  auto policy_report = validate_policy(policy);
  report.violations.insert(report.violations.end(),
                           policy_report.violations.begin(),
                           policy_report.violations.end());
  return report;
}

}  // namespace cqot
