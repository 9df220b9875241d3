#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cqot/engine.hpp"
#include "cqot/gateway.hpp"
#include "cqot/prompting.hpp"

namespace cqot {

struct JudgeAttempt {
  int score = 0;  // 1..10
  std::string rationale;

  bool operator==(const JudgeAttempt&) const = default;
};

enum class JudgeStatus { Consensus, ModalFallback };

const char* to_string(JudgeStatus status);
JudgeStatus judge_status_from_string(const std::string& name);

/// The agreed 1-10 score for one answer, with the attempt history that
/// produced it.
struct JudgeVerdict {
  std::string question_id;
  int turn_index = 1;
  TechniqueMode mode = TechniqueMode::Standard;
  std::vector<JudgeAttempt> attempts;
  int consensus_score = 0;
  bool followup_used = false;
  JudgeStatus status = JudgeStatus::Consensus;

  bool operator==(const JudgeVerdict&) const = default;
};

/// One answer to grade.
struct JudgeItem {
  std::string question_id;
  int turn_index = 1;
  TechniqueMode mode = TechniqueMode::Standard;
  std::string question_text;
  std::optional<std::string> reference_answer;
  std::string assistant_answer;
  std::optional<Exchange> first_turn;  // required when turn_index == 2
};

enum class FollowupTrigger { Off, Manual, Heuristic };

const char* to_string(FollowupTrigger trigger);
FollowupTrigger followup_from_string(const std::string& name);

struct JudgeOptions {
  int max_attempts = 15;
  FollowupTrigger followup = FollowupTrigger::Off;
  bool duplicate_reference = false;
  /// Overrides the engine's verbosity keyword list when non-empty.
  std::vector<std::string> verbosity_keywords;
};

/// Parses the terminal `Rating: [[N]]` line; falls back to the last
/// standalone integer 1..10. Raises NoScoreFound when neither exists.
int extract_score(const std::string& judge_text);

/// Re-prompts the judge until the same score shows up three times among the
/// last four attempts (a stable triple). Hitting max_attempts without one
/// falls back to the modal score, ties broken toward the lower score.
/// Three consecutive unparseable replies raise NoScoreFound; unparseable
/// replies never count as attempts and are capped at three per run.
JudgeVerdict score_with_consensus(const Engine& engine, Gateway& judge_gateway,
                                  const ProviderProfile& judge_profile,
                                  const JudgeItem& item,
                                  const JudgeOptions& options = {});

/// Reminds the judge that conciseness must not lower a correct answer's
/// score, then restarts consensus counting from zero. The Heuristic trigger
/// fires only when an attempt rationale contains a verbosity-penalty keyword;
/// otherwise the verdict is returned unchanged with no extra calls.
JudgeVerdict apply_followup(const Engine& engine, Gateway& judge_gateway,
                            const ProviderProfile& judge_profile,
                            const JudgeItem& item, const JudgeVerdict& verdict,
                            FollowupTrigger trigger,
                            const JudgeOptions& options = {});

}  // namespace cqot
