#include "cqot/verifier.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

#include "cqot/errors.hpp"

namespace cqot {

const char* to_string(CqAnswer answer) {
  switch (answer) {
    case CqAnswer::Yes: return "yes";
    case CqAnswer::No: return "no";
    case CqAnswer::Unparseable: return "unparseable";
  }
  return "unknown";
}

CqAnswer answer_from_string(const std::string& name) {
  if (name == "yes") return CqAnswer::Yes;
  if (name == "no") return CqAnswer::No;
  if (name == "unparseable") return CqAnswer::Unparseable;
  raise(ErrorKind::SchemaError, "unknown answer value: " + name);
}

const char* to_string(DecisionKind kind) {
  switch (kind) {
    case DecisionKind::Proceed: return "proceed";
    case DecisionKind::Retry: return "retry";
    case DecisionKind::ForcedProceed: return "forced_proceed";
  }
  return "unknown";
}

DecisionKind decision_from_string(const std::string& name) {
  if (name == "proceed") return DecisionKind::Proceed;
  if (name == "retry") return DecisionKind::Retry;
  if (name == "forced_proceed") return DecisionKind::ForcedProceed;
  raise(ErrorKind::SchemaError, "unknown decision kind: " + name);
}

namespace {

// One answer line: optional bullets/quotes/markdown, the question number, a
// punctuation separator, optional markdown, then YES or NO with anything
// after it treated as rationale. Example hits: "1. YES", " - 2) no",
// "**3.** Yes - premises are explicit".
const std::regex& answer_line_pattern() {
  static const std::regex pattern(
      R"(^\s*(?:(?:[-*+>]|#{1,6})\s+)*[*_`]*\s*(\d{1,2})\s*[*_`]*\s*[.):\]-]+\s*[*_`]*\s*(yes|no)(?![A-Za-z])[*_`]*[\s.,;:!-]*(.*)$)",
      std::regex::icase | std::regex::optimize);
  return pattern;
}

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

CqVerdict parse_cq_answers(const std::string& text, int num_cqs) {
  if (num_cqs < 1) raise(ErrorKind::InvalidArgument, "num_cqs must be >= 1");

  CqVerdict verdict;
  verdict.raw_text = text;

  // First value seen per index; conflicting re-statements poison the index.
  std::map<int, CqAnswer> seen;
  std::map<int, bool> conflicted;
  std::map<int, std::string> rationales;

  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    std::smatch match;
    if (!std::regex_match(line, match, answer_line_pattern())) continue;
    int index = 0;
    try {
      index = std::stoi(match[1].str());
    } catch (const std::exception&) {
      continue;
    }
    if (index < 1 || index > num_cqs) continue;

    std::string word = match[2].str();
    std::transform(word.begin(), word.end(), word.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    CqAnswer value = (word == "yes") ? CqAnswer::Yes : CqAnswer::No;

    auto it = seen.find(index);
    if (it == seen.end()) {
      seen[index] = value;
      std::string rationale = trim(match[3].str());
      if (!rationale.empty()) rationales[index] = rationale;
    } else if (it->second != value) {
      conflicted[index] = true;  // ambiguity must not silently pass
    }
  }

  for (int i = 1; i <= num_cqs; ++i) {
    auto it = seen.find(i);
    if (it == seen.end() || conflicted.count(i)) {
      verdict.answers[i] = CqAnswer::Unparseable;
    } else {
      verdict.answers[i] = it->second;
      auto r = rationales.find(i);
      if (r != rationales.end()) verdict.rationales[i] = r->second;
    }
  }
  return verdict;
}

int count_positives(const CqVerdict& verdict) {
  int count = 0;
  for (const auto& [index, answer] : verdict.answers) {
    if (answer == CqAnswer::Yes) ++count;
  }
  return count;
}

int count_unparseable(const CqVerdict& verdict) {
  int count = 0;
  for (const auto& [index, answer] : verdict.answers) {
    if (answer == CqAnswer::Unparseable) ++count;
  }
  return count;
}

Decision decide(int iteration, int positives, const LoopPolicy& policy) {
  if (iteration < 1 || iteration > policy.total_max_iterations) {
    raise(ErrorKind::OutOfRange,
          "iteration " + std::to_string(iteration) + " outside 1.." +
              std::to_string(policy.total_max_iterations));
  }
  if (positives < 0 || positives > policy.num_cqs) {
    raise(ErrorKind::OutOfRange,
          "positives " + std::to_string(positives) + " outside 0.." +
              std::to_string(policy.num_cqs));
  }

  const int threshold = iteration <= policy.early_max_iterations
                            ? policy.early_threshold
                            : policy.late_threshold;
  Decision decision;
  decision.iteration = iteration;
  decision.positives = positives;
  if (positives >= threshold) {
    decision.kind = DecisionKind::Proceed;
  } else if (iteration < policy.total_max_iterations) {
    decision.kind = DecisionKind::Retry;
  } else {
    decision.kind = DecisionKind::ForcedProceed;
  }
  return decision;
}

}  // namespace cqot
