#pragma once

#include <set>
#include <string>
#include <vector>

namespace cqot {

/// One component of the Toulmin decomposition of an argument.
enum class ToulminElement { Claim, Qualifier, Data, Warrant, Rebuttal, Backing };

const char* to_string(ToulminElement element);
ToulminElement toulmin_from_string(const std::string& name);

/// A fixed probing question used to audit a reasoning plan, tagged with the
/// Toulmin elements it targets.
struct CriticalQuestion {
  int index = 0;  // 1-based position in the catalog
  std::string text;
  std::set<ToulminElement> toulmin_tags;

  bool operator==(const CriticalQuestion&) const = default;
};

using Catalog = std::vector<CriticalQuestion>;

/// The built-in eight-question catalog. Immutable at runtime; a config file
/// may substitute a different catalog for experimentation.
const Catalog& default_catalog();

/// How a question turn is answered.
enum class TechniqueMode {
  Standard,  // plain single call
  CoT,       // single call with a step-by-step instruction
  Step1_4,   // plan then answer, no critical-question gate
  CQoT,      // full plan / assess / gate / answer loop
};

const char* to_string(TechniqueMode mode);
TechniqueMode mode_from_string(const std::string& name);

/// Which prompt (and sampling profile) a model call uses.
enum class StepKind {
  Standard,
  CoT,
  Step1,
  Step2,
  Step4,
  JudgeTurn1,
  JudgeTurn2,
  JudgeFollowup,
};

const char* to_string(StepKind step);
StepKind step_from_string(const std::string& name);

/// Gate policy for the plan-verification loop: require early_threshold
/// positives for the first early_max_iterations, then late_threshold, and
/// proceed unconditionally once total_max_iterations is exhausted.
struct LoopPolicy {
  int num_cqs = 8;
  int early_threshold = 7;
  int late_threshold = 5;
  int early_max_iterations = 5;
  int total_max_iterations = 10;

  bool operator==(const LoopPolicy&) const = default;
};

struct SamplingParams {
  double temperature = 0.8;
  double top_p = 0.95;
  int max_new_tokens = 2000;

  bool operator==(const SamplingParams&) const = default;
};

/// One chat-completion backend configuration. Creative params drive plan
/// sketching and baseline answers; objective params drive plan assessment,
/// final replies and judging.
struct ProviderProfile {
  std::string name;
  SamplingParams creative_params;
  SamplingParams objective_params;
  std::string endpoint;
  std::string model_id;
  std::string auth_env_var;

  bool operator==(const ProviderProfile&) const = default;
};

struct ReasoningPlan {
  std::string raw_text;
  int iteration = 1;

  bool operator==(const ReasoningPlan&) const = default;
};

/// Benchmark topic. The pipeline is exercised on Reasoning and Math; the
/// remaining MT-Bench-style categories load but are untested territory.
enum class Category {
  Reasoning,
  Math,
  Writing,
  Roleplay,
  Coding,
  Extraction,
  Stem,
  Humanities,
};

const char* to_string(Category category);
Category category_from_string(const std::string& name);

/// A two-turn benchmark item; the second turn depends on the first exchange.
struct BenchQuestion {
  std::string id;
  Category category = Category::Reasoning;
  std::vector<std::string> turns;              // exactly 2
  std::vector<std::string> reference_answers;  // 0..2, aligned with turns

  bool operator==(const BenchQuestion&) const = default;
};

/// A completed question/answer pair carried into later turns.
struct Exchange {
  std::string question;
  std::string answer;

  bool operator==(const Exchange&) const = default;
};

using History = std::vector<Exchange>;

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Checks every profile and policy invariant. Violations are data, not
/// failures: the report is empty iff the configuration is valid.
ValidationReport validate_config(const ProviderProfile& profile,
                                 const LoopPolicy& policy);

ValidationReport validate_policy(const LoopPolicy& policy);
ValidationReport validate_profile(const ProviderProfile& profile);
ValidationReport validate_catalog(const Catalog& catalog);

}  // namespace cqot
