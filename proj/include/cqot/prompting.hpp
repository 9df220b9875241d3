#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cqot/model.hpp"

namespace cqot {

/// Payload slots a template may carry. Each renders as a bracketed tag block
/// on its own lines, e.g. [USER PROMPT] ... [/USER PROMPT].
enum class SlotName {
  UserPrompt,
  ReasoningSteps,
  ConversationHistory,
  ReferenceAnswer,
  AssistantAnswer,
  FirstTurnExchange,
};

const char* slot_placeholder(SlotName slot);  // e.g. "user_prompt"
const char* slot_tag(SlotName slot);          // e.g. "USER PROMPT"

struct PromptTemplate {
  StepKind step = StepKind::Standard;
  std::string body;          // full skeleton with {{placeholder}} lines
  std::set<SlotName> slots;  // payload slots the body must reference
};

/// The prompt wordings for every step. Compiled-in defaults, overridable
/// per-file from a template directory.
class TemplateSet {
 public:
  static TemplateSet builtin();

  /// Builtin set with any step overridden by a `<step>.txt` file in `dir`.
  /// Throws ConfigError when a file's placeholders don't match the step's
  /// slot contract.
  static TemplateSet load(const std::filesystem::path& dir);

  const PromptTemplate& at(StepKind step) const;

 private:
  std::map<StepKind, PromptTemplate> templates_;
};

struct RenderedPrompt {
  StepKind step = StepKind::Standard;
  std::string text;
};

/// Payload lines that would read as one of the scheme's tag markers get the
/// opening bracket doubled; unescape reverses it.
std::string escape_payload(const std::string& payload);
std::string unescape_payload(const std::string& payload);

/// Payload of the first `tag` block in rendered text, unescaped.
std::optional<std::string> extract_block(const std::string& rendered,
                                         const std::string& tag);

RenderedPrompt render_standard(const TemplateSet& templates,
                               const std::string& query,
                               const History& history = {});

RenderedPrompt render_cot(const TemplateSet& templates, const std::string& query,
                          const History& history = {});

struct Step1Options {
  /// When non-empty, the instruction asks for a revised plan addressing
  /// these failed question indices (experimental feedback mode).
  std::vector<int> failed_cq_indices;
};

RenderedPrompt render_step1(const TemplateSet& templates, const std::string& query,
                            const History& history = {},
                            const Step1Options& options = {});

struct Step2Options {
  bool strict_format = false;  // used by the optional reformat re-ask
};

RenderedPrompt render_step2(const TemplateSet& templates, const std::string& query,
                            const ReasoningPlan& plan, const Catalog& catalog,
                            const Step2Options& options = {});

RenderedPrompt render_step4(const TemplateSet& templates, const std::string& query,
                            const ReasoningPlan& plan,
                            const History& history = {});

struct JudgeInputs {
  std::string question_text;
  std::optional<std::string> reference_answer;
  std::string assistant_answer;
  std::optional<Exchange> first_turn;  // required for turn 2
  /// Manual corrective action: render the reference block twice so an
  /// inattentive judge cannot miss it.
  bool duplicate_reference = false;
};

RenderedPrompt render_judge(const TemplateSet& templates, const JudgeInputs& inputs,
                            int turn_index);

/// Convenience overload selecting turn text and reference from the question.
RenderedPrompt render_judge(const TemplateSet& templates,
                            const BenchQuestion& question, int turn_index,
                            const std::string& answer,
                            const std::optional<Exchange>& first_turn = {});

/// Fixed reminder: conciseness must not lower the score of a correct answer.
RenderedPrompt render_judge_followup(const TemplateSet& templates);

}  // namespace cqot
