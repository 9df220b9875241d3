#include "cqot/prompting.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include "cqot/errors.hpp"

namespace cqot {

namespace {

constexpr const char* kSystemInstructionTag = "SYSTEM INSTRUCTION";

constexpr const char* kCriticalQuestionsPlaceholder = "critical_questions";

const std::vector<SlotName>& all_slots() {
  static const std::vector<SlotName> slots = {
      SlotName::UserPrompt,        SlotName::ReasoningSteps,
      SlotName::ConversationHistory, SlotName::ReferenceAnswer,
      SlotName::AssistantAnswer,   SlotName::FirstTurnExchange,
  };
  return slots;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string current;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) lines.push_back(current);
  return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

// All tag marker bodies, used by the escaping rule.
const std::vector<std::string>& marker_bodies() {
  static const std::vector<std::string> bodies = [] {
    std::vector<std::string> out;
    out.push_back(kSystemInstructionTag);
    for (SlotName slot : all_slots()) out.push_back(slot_tag(slot));
    return out;
  }();
  return bodies;
}

// A marker-shaped line is bracket(s) + optional '/' + known tag + ']' and
// nothing else.
bool marker_shaped(const std::string& line, std::size_t* bracket_count) {
  std::size_t k = 0;
  while (k < line.size() && line[k] == '[') ++k;
  if (k == 0) return false;
  std::size_t pos = k;
  if (pos < line.size() && line[pos] == '/') ++pos;
  for (const auto& body : marker_bodies()) {
    if (line.compare(pos, body.size(), body) == 0 &&
        pos + body.size() + 1 == line.size() && line.back() == ']') {
      *bracket_count = k;
      return true;
    }
  }
  return false;
}

std::string open_marker(const std::string& tag) { return "[" + tag + "]"; }
std::string close_marker(const std::string& tag) { return "[/" + tag + "]"; }

}  // namespace

const char* slot_placeholder(SlotName slot) {
  switch (slot) {
    case SlotName::UserPrompt: return "user_prompt";
    case SlotName::ReasoningSteps: return "reasoning_steps";
    case SlotName::ConversationHistory: return "conversation_history";
    case SlotName::ReferenceAnswer: return "reference_answer";
    case SlotName::AssistantAnswer: return "assistant_answer";
    case SlotName::FirstTurnExchange: return "first_turn_exchange";
  }
  return "unknown";
}

const char* slot_tag(SlotName slot) {
  switch (slot) {
    case SlotName::UserPrompt: return "USER PROMPT";
    case SlotName::ReasoningSteps: return "REASONING STEPS";
    case SlotName::ConversationHistory: return "CONVERSATION HISTORY";
    case SlotName::ReferenceAnswer: return "REFERENCE ANSWER";
    case SlotName::AssistantAnswer: return "ASSISTANT'S ANSWER";
    case SlotName::FirstTurnExchange: return "FIRST TURN EXCHANGE";
  }
  return "UNKNOWN";
}

std::string escape_payload(const std::string& payload) {
  std::vector<std::string> lines = split_lines(payload);
  for (auto& line : lines) {
    std::size_t brackets = 0;
    if (marker_shaped(line, &brackets)) line.insert(0, "[");
  }
  std::string out = join_lines(lines);
  if (!payload.empty() && payload.back() != '\n' && !out.empty()) out.pop_back();
  return out;
}

std::string unescape_payload(const std::string& payload) {
  std::vector<std::string> lines = split_lines(payload);
  for (auto& line : lines) {
    std::size_t brackets = 0;
    if (marker_shaped(line, &brackets) && brackets >= 2) line.erase(0, 1);
  }
  std::string out = join_lines(lines);
  if (!payload.empty() && payload.back() != '\n' && !out.empty()) out.pop_back();
  return out;
}

std::optional<std::string> extract_block(const std::string& rendered,
                                         const std::string& tag) {
  const std::string open = open_marker(tag);
  const std::string close = close_marker(tag);
  std::vector<std::string> payload;
  bool inside = false;
  for (const auto& line : split_lines(rendered)) {
    if (!inside) {
      if (line == open) inside = true;
      continue;
    }
    if (line == close) {
      std::string joined = join_lines(payload);
      if (!joined.empty()) joined.pop_back();  // drop trailing newline
      return unescape_payload(joined);
    }
    payload.push_back(line);
  }
  return std::nullopt;
}

namespace {

// ---------------------------------------------------------------------------
// Built-in template bodies. Shipped verbatim as templates/<step>.txt; a
// template directory may override any of them at startup.
// ---------------------------------------------------------------------------

constexpr const char* kStandardBody =
    R"([SYSTEM INSTRUCTION]
You are a helpful assistant. Answer the question given inside the User Prompt tags directly, accurately and completely. If earlier conversation turns are provided inside the Conversation History tags, stay consistent with them.
[/SYSTEM INSTRUCTION]
{{conversation_history}}
{{user_prompt}}
)";

constexpr const char* kCotBody =
    R"([SYSTEM INSTRUCTION]
You are a helpful assistant. Answer the question given inside the User Prompt tags. Let's think step by step: write out your intermediate reasoning steps explicitly, then state the final answer. If earlier conversation turns are provided inside the Conversation History tags, stay consistent with them.
[/SYSTEM INSTRUCTION]
{{conversation_history}}
{{user_prompt}}
)";

constexpr const char* kStep1Body =
    R"([SYSTEM INSTRUCTION]
Reason logically about the question given inside the User Prompt tags and sketch a plan for answering it. Divide every line of reasoning into premises and a conclusion, so that each conclusion derives from its stated premises. Number the reasoning steps. Do not answer the question itself: no final response to the user may be given at this stage, only the reasoning plan. If earlier conversation turns are provided inside the Conversation History tags, take them into account.
[/SYSTEM INSTRUCTION]
{{conversation_history}}
{{user_prompt}}
)";

constexpr const char* kStep2Body =
    R"([SYSTEM INSTRUCTION]
A reasoning plan intended to answer the question inside the User Prompt tags is given inside the Reasoning Steps tags. Assess the validity of that plan by answering each of the following critical questions about it:

{{critical_questions}}

Answer every question with exactly YES or NO. Reply with one numbered line per question, of the form "N. YES" or "N. NO", matching the question number. You may add a short rationale on the same line after the answer.
[/SYSTEM INSTRUCTION]
{{user_prompt}}
{{reasoning_steps}}
)";

constexpr const char* kStep4Body =
    R"([SYSTEM INSTRUCTION]
Answer the question given inside the User Prompt tags. A verified reasoning plan is provided inside the Reasoning Steps tags. Strictly follow that plan, step by step, to produce the final reply to the question. If earlier conversation turns are provided inside the Conversation History tags, stay consistent with them.
[/SYSTEM INSTRUCTION]
{{conversation_history}}
{{reasoning_steps}}
{{user_prompt}}
)";

constexpr const char* kJudgeTurn1Body =
    R"([SYSTEM INSTRUCTION]
You are an impartial judge. Evaluate the answer given inside the Assistant's Answer tags to the reasoning or math question inside the User Prompt tags. Judge the correctness and helpfulness of the answer. When a reference answer is provided inside the Reference Answer tags, check the assistant's answer against it. Be objective and do not let the answer's position, style or length sway the evaluation of its correctness. Explain your assessment briefly, then end your reply with a single line of exactly this form:
Rating: [[N]]
where N is an integer from 1 to 10 and higher means better.
[/SYSTEM INSTRUCTION]
{{user_prompt}}
{{reference_answer}}
{{assistant_answer}}
)";

constexpr const char* kJudgeTurn2Body =
    R"([SYSTEM INSTRUCTION]
You are an impartial judge evaluating the second part of a two-part exchange. The First Turn Exchange tags contain the first question together with the answer the assistant already gave to it. The User Prompt tags contain the follow-up question, and the Assistant's Answer tags contain the assistant's answer to that follow-up. Judge the correctness and helpfulness of the follow-up answer in the context of the first exchange. When a reference answer is provided inside the Reference Answer tags, check the assistant's answer against it. Explain your assessment briefly, then end your reply with a single line of exactly this form:
Rating: [[N]]
where N is an integer from 1 to 10 and higher means better.
[/SYSTEM INSTRUCTION]
{{first_turn_exchange}}
{{user_prompt}}
{{reference_answer}}
{{assistant_answer}}
)";

constexpr const char* kJudgeFollowupBody =
    R"([SYSTEM INSTRUCTION]
Reconsider your evaluation. Conciseness must not lower the score of a correct answer: correctness takes precedence over the length of the response. If the previous score was reduced because the answer was long, thorough or not concise, re-evaluate without that penalty. End your reply with a single line of exactly this form:
Rating: [[N]]
[/SYSTEM INSTRUCTION]
)";

std::set<SlotName> expected_slots(StepKind step) {
  switch (step) {
    case StepKind::Standard:
    case StepKind::CoT:
    case StepKind::Step1:
      return {SlotName::UserPrompt, SlotName::ConversationHistory};
    case StepKind::Step2:
      return {SlotName::UserPrompt, SlotName::ReasoningSteps};
    case StepKind::Step4:
      return {SlotName::UserPrompt, SlotName::ReasoningSteps,
              SlotName::ConversationHistory};
    case StepKind::JudgeTurn1:
      return {SlotName::UserPrompt, SlotName::ReferenceAnswer,
              SlotName::AssistantAnswer};
    case StepKind::JudgeTurn2:
      return {SlotName::FirstTurnExchange, SlotName::UserPrompt,
              SlotName::ReferenceAnswer, SlotName::AssistantAnswer};
    case StepKind::JudgeFollowup:
      return {};
  }
  return {};
}

std::set<std::string> body_placeholders(const std::string& body) {
  static const std::regex placeholder(R"(\{\{([a-z_]+)\}\})");
  std::set<std::string> names;
  auto begin = std::sregex_iterator(body.begin(), body.end(), placeholder);
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    names.insert((*it)[1].str());
  }
  return names;
}

void check_template(const PromptTemplate& tmpl) {
  std::set<std::string> expected;
  for (SlotName slot : tmpl.slots) expected.insert(slot_placeholder(slot));
  if (tmpl.step == StepKind::Step2) expected.insert(kCriticalQuestionsPlaceholder);

  std::set<std::string> found = body_placeholders(tmpl.body);
  if (found != expected) {
    std::ostringstream oss;
    oss << "template for step '" << to_string(tmpl.step)
        << "' must reference exactly these placeholders:";
    for (const auto& name : expected) oss << " {{" << name << "}}";
    raise(ErrorKind::ConfigError, oss.str());
  }
}

PromptTemplate make_template(StepKind step, const char* body) {
  PromptTemplate tmpl{step, body, expected_slots(step)};
  check_template(tmpl);
  return tmpl;
}

std::string exchange_payload(const Exchange& exchange) {
  return "User:\n" + exchange.question + "\nAssistant:\n" + exchange.answer;
}

std::string history_payload(const History& history) {
  std::string out;
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (i > 0) out += "\n\n";
    out += exchange_payload(history[i]);
  }
  return out;
}

std::string numbered_questions(const Catalog& catalog) {
  std::string out;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (i > 0) out += '\n';
    out += std::to_string(catalog[i].index) + ". " + catalog[i].text;
  }
  return out;
}

struct RenderInputs {
  std::map<SlotName, std::string> payloads;
  std::vector<std::string> instruction_extras;
  const Catalog* catalog = nullptr;
  int reference_repeats = 1;
};

std::string render_body(const PromptTemplate& tmpl, const RenderInputs& inputs) {
  std::vector<std::string> out;
  const std::string close_instruction = close_marker(kSystemInstructionTag);

  for (const std::string& line : split_lines(tmpl.body)) {
    const std::string token = trim(line);
    if (token == close_instruction && !inputs.instruction_extras.empty()) {
      for (const auto& extra : inputs.instruction_extras) out.push_back(extra);
      out.push_back(line);
      continue;
    }
    if (token.size() > 4 && token.starts_with("{{") && token.ends_with("}}")) {
      const std::string name = token.substr(2, token.size() - 4);
      if (name == kCriticalQuestionsPlaceholder) {
        for (const auto& q : split_lines(numbered_questions(*inputs.catalog))) {
          out.push_back(q);
        }
        continue;
      }
      for (SlotName slot : all_slots()) {
        if (name != slot_placeholder(slot)) continue;
        auto it = inputs.payloads.find(slot);
        if (it == inputs.payloads.end()) break;  // absent slot: omit block
        int repeats =
            slot == SlotName::ReferenceAnswer ? inputs.reference_repeats : 1;
        for (int r = 0; r < repeats; ++r) {
          out.push_back(open_marker(slot_tag(slot)));
          for (const auto& p : split_lines(escape_payload(it->second))) {
            out.push_back(p);
          }
          out.push_back(close_marker(slot_tag(slot)));
        }
        break;
      }
      continue;
    }
    out.push_back(line);
  }
  return join_lines(out);
}

std::string require_nonempty(const std::string& value, ErrorKind kind,
                             const char* what) {
  if (trim(value).empty()) {
    raise(kind, std::string(what) + " must be non-empty");
  }
  return value;
}

}  // namespace

TemplateSet TemplateSet::builtin() {
  TemplateSet set;
  set.templates_[StepKind::Standard] = make_template(StepKind::Standard, kStandardBody);
  set.templates_[StepKind::CoT] = make_template(StepKind::CoT, kCotBody);
  set.templates_[StepKind::Step1] = make_template(StepKind::Step1, kStep1Body);
  set.templates_[StepKind::Step2] = make_template(StepKind::Step2, kStep2Body);
  set.templates_[StepKind::Step4] = make_template(StepKind::Step4, kStep4Body);
  set.templates_[StepKind::JudgeTurn1] =
      make_template(StepKind::JudgeTurn1, kJudgeTurn1Body);
  set.templates_[StepKind::JudgeTurn2] =
      make_template(StepKind::JudgeTurn2, kJudgeTurn2Body);
  set.templates_[StepKind::JudgeFollowup] =
      make_template(StepKind::JudgeFollowup, kJudgeFollowupBody);
  return set;
}

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
  TemplateSet set = builtin();
  if (!std::filesystem::is_directory(dir)) {
    raise(ErrorKind::ConfigError,
          "template directory does not exist: " + dir.string());
  }
  for (auto& [step, tmpl] : set.templates_) {
    const auto path = dir / (std::string(to_string(step)) + ".txt");
    if (!std::filesystem::exists(path)) continue;
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::IoError, "cannot read template: " + path.string());
    std::ostringstream content;
    content << in.rdbuf();
    tmpl.body = content.str();
    check_template(tmpl);
  }
  return set;
}

const PromptTemplate& TemplateSet::at(StepKind step) const {
  auto it = templates_.find(step);
  if (it == templates_.end()) {
    raise(ErrorKind::ConfigError,
          std::string("no template for step ") + to_string(step));
  }
  return it->second;
}

RenderedPrompt render_standard(const TemplateSet& templates,
                               const std::string& query, const History& history) {
  require_nonempty(query, ErrorKind::EmptyQuery, "query");
  RenderInputs inputs;
  inputs.payloads[SlotName::UserPrompt] = query;
  if (!history.empty()) {
    inputs.payloads[SlotName::ConversationHistory] = history_payload(history);
  }
  return {StepKind::Standard, render_body(templates.at(StepKind::Standard), inputs)};
}

RenderedPrompt render_cot(const TemplateSet& templates, const std::string& query,
                          const History& history) {
  require_nonempty(query, ErrorKind::EmptyQuery, "query");
  RenderInputs inputs;
  inputs.payloads[SlotName::UserPrompt] = query;
  if (!history.empty()) {
    inputs.payloads[SlotName::ConversationHistory] = history_payload(history);
  }
  return {StepKind::CoT, render_body(templates.at(StepKind::CoT), inputs)};
}

RenderedPrompt render_step1(const TemplateSet& templates, const std::string& query,
                            const History& history, const Step1Options& options) {
  require_nonempty(query, ErrorKind::EmptyQuery, "query");
  RenderInputs inputs;
  inputs.payloads[SlotName::UserPrompt] = query;
  if (!history.empty()) {
    inputs.payloads[SlotName::ConversationHistory] = history_payload(history);
  }
  if (!options.failed_cq_indices.empty()) {
    std::ostringstream note;
    note << "The previous reasoning plan failed critical question";
    note << (options.failed_cq_indices.size() > 1 ? "s " : " ");
    for (std::size_t i = 0; i < options.failed_cq_indices.size(); ++i) {
      if (i > 0) note << ", ";
      note << options.failed_cq_indices[i];
    }
    note << ". Produce a revised plan that addresses them.";
    inputs.instruction_extras.push_back(note.str());
  }
  return {StepKind::Step1, render_body(templates.at(StepKind::Step1), inputs)};
}

RenderedPrompt render_step2(const TemplateSet& templates, const std::string& query,
                            const ReasoningPlan& plan, const Catalog& catalog,
                            const Step2Options& options) {
  require_nonempty(query, ErrorKind::EmptyQuery, "query");
  require_nonempty(plan.raw_text, ErrorKind::EmptyPlan, "plan");
  RenderInputs inputs;
  inputs.payloads[SlotName::UserPrompt] = query;
  inputs.payloads[SlotName::ReasoningSteps] = plan.raw_text;
  inputs.catalog = &catalog;
  if (options.strict_format) {
    inputs.instruction_extras.push_back(
        "Reply with the numbered YES/NO lines only, nothing else.");
  }
  return {StepKind::Step2, render_body(templates.at(StepKind::Step2), inputs)};
}

RenderedPrompt render_step4(const TemplateSet& templates, const std::string& query,
                            const ReasoningPlan& plan, const History& history) {
  require_nonempty(query, ErrorKind::EmptyQuery, "query");
  require_nonempty(plan.raw_text, ErrorKind::EmptyPlan, "plan");
  RenderInputs inputs;
  inputs.payloads[SlotName::UserPrompt] = query;
  inputs.payloads[SlotName::ReasoningSteps] = plan.raw_text;
  if (!history.empty()) {
    inputs.payloads[SlotName::ConversationHistory] = history_payload(history);
  }
  return {StepKind::Step4, render_body(templates.at(StepKind::Step4), inputs)};
}

RenderedPrompt render_judge(const TemplateSet& templates, const JudgeInputs& judge,
                            int turn_index) {
  if (turn_index != 1 && turn_index != 2) {
    raise(ErrorKind::OutOfRange, "turn_index must be 1 or 2");
  }
  require_nonempty(judge.question_text, ErrorKind::EmptyQuery, "question");
  require_nonempty(judge.assistant_answer, ErrorKind::EmptyAnswer, "answer");
  if (turn_index == 2 && !judge.first_turn.has_value()) {
    raise(ErrorKind::MissingFirstTurn,
          "turn 2 judging requires the first-turn exchange");
  }

  RenderInputs inputs;
  inputs.payloads[SlotName::UserPrompt] = judge.question_text;
  inputs.payloads[SlotName::AssistantAnswer] = judge.assistant_answer;
  if (judge.reference_answer.has_value()) {
    inputs.payloads[SlotName::ReferenceAnswer] = *judge.reference_answer;
    inputs.reference_repeats = judge.duplicate_reference ? 2 : 1;
  }
  const StepKind step =
      turn_index == 1 ? StepKind::JudgeTurn1 : StepKind::JudgeTurn2;
  if (turn_index == 2) {
    inputs.payloads[SlotName::FirstTurnExchange] =
        exchange_payload(*judge.first_turn);
  }
  return {step, render_body(templates.at(step), inputs)};
}

RenderedPrompt render_judge(const TemplateSet& templates,
                            const BenchQuestion& question, int turn_index,
                            const std::string& answer,
                            const std::optional<Exchange>& first_turn) {
  if (turn_index != 1 && turn_index != 2) {
    raise(ErrorKind::OutOfRange, "turn_index must be 1 or 2");
  }
  JudgeInputs inputs;
  inputs.question_text = turn_index <= static_cast<int>(question.turns.size())
                             ? question.turns[turn_index - 1]
                             : std::string{};
  if (turn_index <= static_cast<int>(question.reference_answers.size())) {
    inputs.reference_answer = question.reference_answers[turn_index - 1];
  }
  inputs.assistant_answer = answer;
  inputs.first_turn = first_turn;
  return render_judge(templates, inputs, turn_index);
}

RenderedPrompt render_judge_followup(const TemplateSet& templates) {
  RenderInputs inputs;
  return {StepKind::JudgeFollowup,
          render_body(templates.at(StepKind::JudgeFollowup), inputs)};
}

}  // namespace cqot
