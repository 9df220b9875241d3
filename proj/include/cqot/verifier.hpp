#pragma once

#include <map>
#include <string>

#include "cqot/model.hpp"

namespace cqot {

enum class CqAnswer { Yes, No, Unparseable };

const char* to_string(CqAnswer answer);
CqAnswer answer_from_string(const std::string& name);

/// Parsed plan-assessment replies for one iteration. `answers` always holds
/// exactly num_cqs entries keyed 1..num_cqs.
struct CqVerdict {
  std::map<int, CqAnswer> answers;
  std::map<int, std::string> rationales;  // only for indices that carried one
  std::string raw_text;

  bool operator==(const CqVerdict&) const = default;
};

enum class DecisionKind { Proceed, Retry, ForcedProceed };

const char* to_string(DecisionKind kind);
DecisionKind decision_from_string(const std::string& name);

struct Decision {
  DecisionKind kind = DecisionKind::Retry;
  int iteration = 0;
  int positives = 0;

  bool operator==(const Decision&) const = default;
};

/// Scans arbitrary model output for lines of the form `N. YES` / `N. NO`
/// (case-insensitive, tolerant of markdown and punctuation variants).
/// Missing indices and duplicate lines with conflicting values come back as
/// Unparseable. Total: never throws on any input text.
CqVerdict parse_cq_answers(const std::string& text, int num_cqs);

/// Yes entries only; Unparseable counts as not-positive.
int count_positives(const CqVerdict& verdict);

int count_unparseable(const CqVerdict& verdict);

/// The gate. Threshold is early_threshold through early_max_iterations and
/// late_threshold after; below threshold the plan is retried until the
/// iteration budget forces it through.
Decision decide(int iteration, int positives, const LoopPolicy& policy);

}  // namespace cqot
