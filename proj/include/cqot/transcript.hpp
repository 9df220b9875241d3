#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cqot/model.hpp"
#include "cqot/verifier.hpp"

namespace cqot {

/// One plan/assess/decide pass of the loop. Standard and CoT runs have none;
/// the two-step ablation has exactly one with no verdict.
struct IterationRecord {
  int index = 1;  // equals 1-based position in the transcript
  ReasoningPlan plan;
  std::optional<CqVerdict> verdict;
  std::optional<Decision> decision;
  bool reformat_used = false;

  bool operator==(const IterationRecord&) const = default;
};

struct CallUsage {
  StepKind step = StepKind::Standard;
  int iteration = 0;
  long input_tokens = 0;
  long output_tokens = 0;

  bool operator==(const CallUsage&) const = default;
};

enum class TranscriptStatus { Completed, Aborted };

const char* to_string(TranscriptStatus status);
TranscriptStatus transcript_status_from_string(const std::string& name);

/// Full record of one question-turn run: what was planned, how it was judged
/// at the gate, and what was finally answered.
struct PipelineTranscript {
  std::string question_id;
  int turn_index = 1;  // 1 or 2
  TechniqueMode mode = TechniqueMode::Standard;
  TranscriptStatus status = TranscriptStatus::Completed;
  std::vector<IterationRecord> iterations;
  std::string final_answer;
  std::vector<Decision> decision_trail;
  std::string started_at;   // UTC ISO-8601
  std::string finished_at;  // UTC ISO-8601
  std::vector<CallUsage> token_usage;  // empty when the backend omits usage

  bool operator==(const PipelineTranscript&) const = default;
};

}  // namespace cqot
