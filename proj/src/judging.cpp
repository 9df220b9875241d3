#include "cqot/judging.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>

#include "cqot/errors.hpp"

namespace cqot {

const char* to_string(FollowupTrigger trigger) {
  switch (trigger) {
    case FollowupTrigger::Off: return "off";
    case FollowupTrigger::Manual: return "manual";
    case FollowupTrigger::Heuristic: return "heuristic";
  }
  return "unknown";
}

FollowupTrigger followup_from_string(const std::string& name) {
  if (name == "off") return FollowupTrigger::Off;
  if (name == "manual") return FollowupTrigger::Manual;
  if (name == "heuristic") return FollowupTrigger::Heuristic;
  raise(ErrorKind::SchemaError, "unknown followup trigger: " + name);
}

int extract_score(const std::string& judge_text) {
  // Terminal machine-readable form first.
  static const std::regex rating(R"(Rating:\s*\[\[\s*(\d{1,2})\s*\]\])",
                                 std::regex::icase);
  int last_rating = 0;
  for (auto it = std::sregex_iterator(judge_text.begin(), judge_text.end(), rating);
       it != std::sregex_iterator(); ++it) {
    int value = std::stoi((*it)[1].str());
    if (value >= 1 && value <= 10) last_rating = value;
  }
  if (last_rating != 0) return last_rating;

  // Fallback: the last standalone integer in range.
  static const std::regex standalone(R"((?:^|[^0-9A-Za-z.])(10|[1-9])(?![0-9A-Za-z]))");
  int last_standalone = 0;
  for (auto it =
           std::sregex_iterator(judge_text.begin(), judge_text.end(), standalone);
       it != std::sregex_iterator(); ++it) {
    last_standalone = std::stoi((*it)[1].str());
  }
  if (last_standalone != 0) return last_standalone;

  raise(ErrorKind::NoScoreFound, "judge reply carries no 1-10 score");
}

namespace {

// Consensus = the same score at least 3 times among the last (up to) 4
// attempts. A bare cumulative triple would let an oscillating judge
// terminate; requiring the triple inside a short window demands actual
// agreement while still tolerating one outlier.
bool stable_triple(const std::vector<JudgeAttempt>& attempts, int* out_score) {
  if (attempts.size() < 3) return false;
  const std::size_t window = std::min<std::size_t>(attempts.size(), 4);
  std::map<int, int> counts;
  for (std::size_t i = attempts.size() - window; i < attempts.size(); ++i) {
    if (++counts[attempts[i].score] >= 3) {
      *out_score = attempts[i].score;
      return true;
    }
  }
  return false;
}

int modal_score_tie_low(const std::vector<JudgeAttempt>& attempts) {
  std::map<int, int> counts;  // ordered: ties resolve toward the lower score
  for (const auto& attempt : attempts) ++counts[attempt.score];
  int best_score = 0;
  int best_count = 0;
  for (const auto& [score, count] : counts) {
    if (count > best_count) {
      best_score = score;
      best_count = count;
    }
  }
  return best_score;
}

std::string lowercase(const std::string& text) {
  std::string out = text;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

struct ConsensusLoop {
  Gateway& gateway;
  const ProviderProfile& profile;
  const JudgeItem& item;
  int max_attempts;

  /// Runs one consensus round over `conversation`, appending attempts to the
  /// verdict. `step` routes scripted lookups; call numbering restarts at 1.
  void run(JudgeVerdict& verdict, const std::vector<ChatMessage>& conversation,
           StepKind step, std::size_t counted_from) {
    int calls = 0;
    int consecutive_unparseable = 0;
    int total_unparseable = 0;

    while (static_cast<int>(verdict.attempts.size() - counted_from) <
           max_attempts) {
      ++calls;
      ChatRequest request;
      request.model_id = profile.model_id;
      request.messages = conversation;
      request.params = sampling_for_step(profile, step);
      request.tag = RequestTag{step, calls, item.turn_index};

      const std::string reply = gateway.complete(request).content;
      int score = 0;
      try {
        score = extract_score(reply);
      } catch (const CqotError& error) {
        if (error.kind() != ErrorKind::NoScoreFound) throw;
        ++total_unparseable;
        if (++consecutive_unparseable >= 3) {
          raise(ErrorKind::NoScoreFound,
                "judge produced three consecutive unparseable replies");
        }
        if (total_unparseable >= 3) break;  // grace budget spent
        continue;
      }
      consecutive_unparseable = 0;
      verdict.attempts.push_back({score, reply});

      int agreed = 0;
      std::vector<JudgeAttempt> counted(verdict.attempts.begin() + counted_from,
                                        verdict.attempts.end());
      if (stable_triple(counted, &agreed)) {
        verdict.consensus_score = agreed;
        verdict.status = JudgeStatus::Consensus;
        return;
      }
    }

    std::vector<JudgeAttempt> counted(verdict.attempts.begin() + counted_from,
                                      verdict.attempts.end());
    if (counted.empty()) {
      raise(ErrorKind::NoScoreFound, "judge produced no parseable scores");
    }
    verdict.consensus_score = modal_score_tie_low(counted);
    verdict.status = JudgeStatus::ModalFallback;
  }
};

RenderedPrompt render_item_prompt(const Engine& engine, const JudgeItem& item,
                                  bool duplicate_reference) {
  JudgeInputs inputs;
  inputs.question_text = item.question_text;
  inputs.reference_answer = item.reference_answer;
  inputs.assistant_answer = item.assistant_answer;
  inputs.first_turn = item.first_turn;
  inputs.duplicate_reference = duplicate_reference;
  return render_judge(engine.templates(), inputs, item.turn_index);
}

}  // namespace

JudgeVerdict score_with_consensus(const Engine& engine, Gateway& judge_gateway,
                                  const ProviderProfile& judge_profile,
                                  const JudgeItem& item,
                                  const JudgeOptions& options) {
  if (options.max_attempts < 3) {
    raise(ErrorKind::InvalidArgument, "max_attempts must be >= 3");
  }

  RenderedPrompt prompt =
      render_item_prompt(engine, item, options.duplicate_reference);

  JudgeVerdict verdict;
  verdict.question_id = item.question_id;
  verdict.turn_index = item.turn_index;
  verdict.mode = item.mode;

  ConsensusLoop loop{judge_gateway, judge_profile, item, options.max_attempts};
  loop.run(verdict, {{Role::User, prompt.text}}, prompt.step, 0);

  if (options.followup != FollowupTrigger::Off) {
    return apply_followup(engine, judge_gateway, judge_profile, item, verdict,
                          options.followup, options);
  }
  return verdict;
}

JudgeVerdict apply_followup(const Engine& engine, Gateway& judge_gateway,
                            const ProviderProfile& judge_profile,
                            const JudgeItem& item, const JudgeVerdict& verdict,
                            FollowupTrigger trigger, const JudgeOptions& options) {
  if (trigger == FollowupTrigger::Off) return verdict;

  if (trigger == FollowupTrigger::Heuristic) {
    const std::vector<std::string>& keywords =
        options.verbosity_keywords.empty() ? engine.verbosity_keywords()
                                           : options.verbosity_keywords;
    bool penalized = false;
    for (const auto& attempt : verdict.attempts) {
      const std::string rationale = lowercase(attempt.rationale);
      for (const auto& keyword : keywords) {
        if (rationale.find(lowercase(keyword)) != std::string::npos) {
          penalized = true;
          break;
        }
      }
      if (penalized) break;
    }
    if (!penalized) return verdict;  // unchanged, zero extra calls
  }

  if (verdict.attempts.empty()) {
    raise(ErrorKind::InvalidArgument, "follow-up needs a completed verdict");
  }

  RenderedPrompt original =
      render_item_prompt(engine, item, options.duplicate_reference);
  RenderedPrompt reminder = render_judge_followup(engine.templates());
  std::vector<ChatMessage> conversation = {
      {Role::User, original.text},
      {Role::Assistant, verdict.attempts.back().rationale},
      {Role::User, reminder.text},
  };

  JudgeVerdict updated = verdict;
  updated.followup_used = true;

  // Consensus counting restarts from zero over the post-follow-up attempts.
  ConsensusLoop loop{judge_gateway, judge_profile, item,
                     options.max_attempts > 0 ? options.max_attempts : 15};
  loop.run(updated, conversation, StepKind::JudgeFollowup,
           updated.attempts.size());
  return updated;
}

}  // namespace cqot
