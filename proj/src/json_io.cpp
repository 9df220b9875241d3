#include "cqot/json_io.hpp"

#include "cqot/errors.hpp"

namespace cqot {

namespace {

// Readable schema failures instead of nlohmann's type_error chains.
const json& need(const json& j, const char* field, const std::string& what) {
  auto it = j.find(field);
  if (it == j.end()) {
    raise(ErrorKind::SchemaError, what + ": missing field '" + field + "'");
  }
  return *it;
}

std::string need_string(const json& j, const char* field, const std::string& what) {
  const json& value = need(j, field, what);
  if (!value.is_string()) {
    raise(ErrorKind::SchemaError, what + ": field '" + field + "' must be a string");
  }
  return value.get<std::string>();
}

int need_int(const json& j, const char* field, const std::string& what) {
  const json& value = need(j, field, what);
  if (!value.is_number_integer()) {
    raise(ErrorKind::SchemaError,
          what + ": field '" + field + "' must be an integer");
  }
  return value.get<int>();
}

double need_number(const json& j, const char* field, const std::string& what) {
  const json& value = need(j, field, what);
  if (!value.is_number()) {
    raise(ErrorKind::SchemaError, what + ": field '" + field + "' must be a number");
  }
  return value.get<double>();
}

}  // namespace

json parse_json_object(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    raise(ErrorKind::SchemaError, what + ": not a JSON object");
  }
  return j;
}

json to_json(const SamplingParams& params) {
  return {{"temperature", params.temperature},
          {"top_p", params.top_p},
          {"max_new_tokens", params.max_new_tokens}};
}

SamplingParams sampling_params_from_json(const json& j) {
  SamplingParams params;
  params.temperature = need_number(j, "temperature", "sampling params");
  params.top_p = need_number(j, "top_p", "sampling params");
  params.max_new_tokens = need_int(j, "max_new_tokens", "sampling params");
  return params;
}

json to_json(const ProviderProfile& profile) {
  return {{"name", profile.name},
          {"creative_params", to_json(profile.creative_params)},
          {"objective_params", to_json(profile.objective_params)},
          {"endpoint", profile.endpoint},
          {"model_id", profile.model_id},
          {"auth_env_var", profile.auth_env_var}};
}

ProviderProfile provider_profile_from_json(const json& j) {
  ProviderProfile profile;
  profile.name = need_string(j, "name", "profile");
  profile.creative_params =
      sampling_params_from_json(need(j, "creative_params", "profile"));
  profile.objective_params =
      sampling_params_from_json(need(j, "objective_params", "profile"));
  profile.endpoint = j.value("endpoint", "");
  profile.model_id = j.value("model_id", "");
  profile.auth_env_var = j.value("auth_env_var", "");
  return profile;
}

json to_json(const LoopPolicy& policy) {
  return {{"num_cqs", policy.num_cqs},
          {"early_threshold", policy.early_threshold},
          {"late_threshold", policy.late_threshold},
          {"early_max_iterations", policy.early_max_iterations},
          {"total_max_iterations", policy.total_max_iterations}};
}

LoopPolicy loop_policy_from_json(const json& j) {
  LoopPolicy policy;
  policy.num_cqs = j.value("num_cqs", policy.num_cqs);
  policy.early_threshold = j.value("early_threshold", policy.early_threshold);
  policy.late_threshold = j.value("late_threshold", policy.late_threshold);
  policy.early_max_iterations =
      j.value("early_max_iterations", policy.early_max_iterations);
  policy.total_max_iterations =
      j.value("total_max_iterations", policy.total_max_iterations);
  return policy;
}

json to_json(const CriticalQuestion& question) {
  json tags = json::array();
  for (ToulminElement tag : question.toulmin_tags) tags.push_back(to_string(tag));
  return {{"index", question.index}, {"text", question.text}, {"toulmin_tags", tags}};
}

CriticalQuestion critical_question_from_json(const json& j) {
  CriticalQuestion question;
  question.index = need_int(j, "index", "critical question");
  question.text = need_string(j, "text", "critical question");
  if (j.contains("toulmin_tags")) {
    for (const auto& tag : j.at("toulmin_tags")) {
      question.toulmin_tags.insert(toulmin_from_string(tag.get<std::string>()));
    }
  }
  return question;
}

json to_json(const Catalog& catalog) {
  json out = json::array();
  for (const auto& question : catalog) out.push_back(to_json(question));
  return out;
}

Catalog catalog_from_json(const json& j) {
  if (!j.is_array()) raise(ErrorKind::SchemaError, "catalog must be an array");
  Catalog catalog;
  for (const auto& item : j) catalog.push_back(critical_question_from_json(item));
  return catalog;
}

json to_json(const BenchQuestion& question) {
  json out = {{"id", question.id},
              {"category", to_string(question.category)},
              {"turns", question.turns}};
  if (!question.reference_answers.empty()) {
    out["reference_answers"] = question.reference_answers;
  }
  return out;
}

BenchQuestion bench_question_from_json(const json& j) {
  BenchQuestion question;
  question.id = need_string(j, "id", "question");
  question.category = category_from_string(need_string(j, "category", "question"));
  const json& turns = need(j, "turns", "question");
  if (!turns.is_array()) {
    raise(ErrorKind::SchemaError, "question: 'turns' must be an array");
  }
  for (const auto& turn : turns) {
    if (!turn.is_string()) {
      raise(ErrorKind::SchemaError, "question: every turn must be a string");
    }
    question.turns.push_back(turn.get<std::string>());
  }
  if (j.contains("reference_answers")) {
    for (const auto& answer : j.at("reference_answers")) {
      question.reference_answers.push_back(answer.get<std::string>());
    }
  }
  if (question.turns.size() != 2) {
    raise(ErrorKind::SchemaError,
          "question '" + question.id + "' must have exactly 2 turns");
  }
  if (question.reference_answers.size() > 2) {
    raise(ErrorKind::SchemaError,
          "question '" + question.id + "' has more than 2 reference answers");
  }
  return question;
}

json to_json(const Exchange& exchange) {
  return {{"question", exchange.question}, {"answer", exchange.answer}};
}

Exchange exchange_from_json(const json& j) {
  return {need_string(j, "question", "exchange"),
          need_string(j, "answer", "exchange")};
}

json to_json(const CqVerdict& verdict) {
  json answers = json::array();
  for (const auto& [index, answer] : verdict.answers) {
    json entry = {{"index", index}, {"answer", to_string(answer)}};
    auto it = verdict.rationales.find(index);
    if (it != verdict.rationales.end()) entry["rationale"] = it->second;
    answers.push_back(entry);
  }
  return {{"answers", answers}, {"raw_text", verdict.raw_text}};
}

CqVerdict cq_verdict_from_json(const json& j) {
  CqVerdict verdict;
  verdict.raw_text = j.value("raw_text", "");
  for (const auto& entry : need(j, "answers", "verdict")) {
    const int index = need_int(entry, "index", "verdict answer");
    verdict.answers[index] =
        answer_from_string(need_string(entry, "answer", "verdict answer"));
    if (entry.contains("rationale")) {
      verdict.rationales[index] = entry.at("rationale").get<std::string>();
    }
  }
  return verdict;
}

json to_json(const Decision& decision) {
  return {{"kind", to_string(decision.kind)},
          {"iteration", decision.iteration},
          {"positives", decision.positives}};
}

Decision decision_from_json(const json& j) {
  Decision decision;
  decision.kind = decision_from_string(need_string(j, "kind", "decision"));
  decision.iteration = need_int(j, "iteration", "decision");
  decision.positives = need_int(j, "positives", "decision");
  return decision;
}

const char* to_string(TranscriptStatus status) {
  switch (status) {
    case TranscriptStatus::Completed: return "completed";
    case TranscriptStatus::Aborted: return "aborted";
  }
  return "unknown";
}

TranscriptStatus transcript_status_from_string(const std::string& name) {
  if (name == "completed") return TranscriptStatus::Completed;
  if (name == "aborted") return TranscriptStatus::Aborted;
  raise(ErrorKind::SchemaError, "unknown transcript status: " + name);
}

json to_json(const PipelineTranscript& transcript) {
  json iterations = json::array();
  for (const auto& record : transcript.iterations) {
    json entry = {{"index", record.index},
                  {"plan",
                   {{"raw_text", record.plan.raw_text},
                    {"iteration", record.plan.iteration}}},
                  {"reformat_used", record.reformat_used}};
    if (record.verdict) entry["verdict"] = to_json(*record.verdict);
    if (record.decision) entry["decision"] = to_json(*record.decision);
    iterations.push_back(entry);
  }
  json trail = json::array();
  for (const auto& decision : transcript.decision_trail) {
    trail.push_back(to_json(decision));
  }
  json usage = json::array();
  for (const auto& call : transcript.token_usage) {
    usage.push_back({{"step", to_string(call.step)},
                     {"iteration", call.iteration},
                     {"input_tokens", call.input_tokens},
                     {"output_tokens", call.output_tokens}});
  }
  return {{"question_id", transcript.question_id},
          {"turn_index", transcript.turn_index},
          {"mode", to_string(transcript.mode)},
          {"status", to_string(transcript.status)},
          {"iterations", iterations},
          {"final_answer", transcript.final_answer},
          {"decision_trail", trail},
          {"started_at", transcript.started_at},
          {"finished_at", transcript.finished_at},
          {"token_usage", usage}};
}

PipelineTranscript pipeline_transcript_from_json(const json& j) {
  PipelineTranscript transcript;
  transcript.question_id = need_string(j, "question_id", "transcript");
  transcript.turn_index = need_int(j, "turn_index", "transcript");
  transcript.mode = mode_from_string(need_string(j, "mode", "transcript"));
  transcript.status =
      transcript_status_from_string(j.value("status", "completed"));
  for (const auto& entry : need(j, "iterations", "transcript")) {
    IterationRecord record;
    record.index = need_int(entry, "index", "iteration");
    const json& plan = need(entry, "plan", "iteration");
    record.plan.raw_text = need_string(plan, "raw_text", "plan");
    record.plan.iteration = need_int(plan, "iteration", "plan");
    record.reformat_used = entry.value("reformat_used", false);
    if (entry.contains("verdict")) {
      record.verdict = cq_verdict_from_json(entry.at("verdict"));
    }
    if (entry.contains("decision")) {
      record.decision = decision_from_json(entry.at("decision"));
    }
    transcript.iterations.push_back(std::move(record));
  }
  transcript.final_answer = j.value("final_answer", "");
  if (j.contains("decision_trail")) {
    for (const auto& entry : j.at("decision_trail")) {
      transcript.decision_trail.push_back(decision_from_json(entry));
    }
  }
  transcript.started_at = j.value("started_at", "");
  transcript.finished_at = j.value("finished_at", "");
  if (j.contains("token_usage")) {
    for (const auto& entry : j.at("token_usage")) {
      CallUsage call;
      call.step = step_from_string(need_string(entry, "step", "usage"));
      call.iteration = need_int(entry, "iteration", "usage");
      call.input_tokens = entry.value("input_tokens", 0L);
      call.output_tokens = entry.value("output_tokens", 0L);
      transcript.token_usage.push_back(call);
    }
  }
  return transcript;
}

const char* to_string(JudgeStatus status) {
  switch (status) {
    case JudgeStatus::Consensus: return "consensus";
    case JudgeStatus::ModalFallback: return "modal_fallback";
  }
  return "unknown";
}

JudgeStatus judge_status_from_string(const std::string& name) {
  if (name == "consensus") return JudgeStatus::Consensus;
  if (name == "modal_fallback") return JudgeStatus::ModalFallback;
  raise(ErrorKind::SchemaError, "unknown judge status: " + name);
}

json to_json(const JudgeVerdict& verdict) {
  json attempts = json::array();
  for (const auto& attempt : verdict.attempts) {
    attempts.push_back(
        {{"score", attempt.score}, {"rationale", attempt.rationale}});
  }
  return {{"question_id", verdict.question_id},
          {"turn_index", verdict.turn_index},
          {"mode", to_string(verdict.mode)},
          {"attempts", attempts},
          {"consensus_score", verdict.consensus_score},
          {"followup_used", verdict.followup_used},
          {"status", to_string(verdict.status)}};
}

JudgeVerdict judge_verdict_from_json(const json& j) {
  JudgeVerdict verdict;
  verdict.question_id = need_string(j, "question_id", "judge verdict");
  verdict.turn_index = need_int(j, "turn_index", "judge verdict");
  verdict.mode = mode_from_string(need_string(j, "mode", "judge verdict"));
  for (const auto& entry : need(j, "attempts", "judge verdict")) {
    verdict.attempts.push_back({need_int(entry, "score", "attempt"),
                                entry.value("rationale", "")});
  }
  verdict.consensus_score = need_int(j, "consensus_score", "judge verdict");
  verdict.followup_used = j.value("followup_used", false);
  verdict.status = judge_status_from_string(need_string(j, "status", "judge verdict"));
  return verdict;
}

json to_json(const TranscriptRecord& record) {
  return {{"schema_version", record.schema_version},
          {"run_id", record.run_id},
          {"question_id", record.question_id},
          {"category", to_string(record.category)},
          {"turn_index", record.turn_index},
          {"mode", to_string(record.mode)},
          {"model", record.model},
          {"profile", record.profile},
          {"question_text", record.question_text},
          {"transcript", to_json(record.transcript)}};
}

TranscriptRecord transcript_record_from_json(const json& j) {
  TranscriptRecord record;
  record.schema_version = j.value("schema_version", 1);
  record.run_id = j.value("run_id", "default");
  record.question_id = need_string(j, "question_id", "transcript record");
  record.category =
      category_from_string(need_string(j, "category", "transcript record"));
  record.turn_index = need_int(j, "turn_index", "transcript record");
  record.mode = mode_from_string(need_string(j, "mode", "transcript record"));
  record.model = need_string(j, "model", "transcript record");
  record.profile = j.value("profile", "");
  record.question_text = j.value("question_text", "");
  record.transcript =
      pipeline_transcript_from_json(need(j, "transcript", "transcript record"));
  return record;
}

json to_json(const JudgmentRecord& record) {
  json out = {{"schema_version", record.schema_version},
              {"run_id", record.run_id},
              {"question_id", record.question_id},
              {"category", to_string(record.category)},
              {"turn_index", record.turn_index},
              {"mode", to_string(record.mode)},
              {"model", record.model},
              {"judge_model", record.judge_model},
              {"failed", record.failed}};
  if (record.failed) {
    out["failure_reason"] = record.failure_reason;
  } else {
    out["verdict"] = to_json(record.verdict);
  }
  return out;
}

JudgmentRecord judgment_record_from_json(const json& j) {
  JudgmentRecord record;
  record.schema_version = j.value("schema_version", 1);
  record.run_id = j.value("run_id", "default");
  record.question_id = need_string(j, "question_id", "judgment record");
  record.category =
      category_from_string(need_string(j, "category", "judgment record"));
  record.turn_index = need_int(j, "turn_index", "judgment record");
  record.mode = mode_from_string(need_string(j, "mode", "judgment record"));
  record.model = need_string(j, "model", "judgment record");
  record.judge_model = j.value("judge_model", "");
  record.failed = j.value("failed", false);
  if (record.failed) {
    record.failure_reason = j.value("failure_reason", "");
  } else {
    record.verdict = judge_verdict_from_json(need(j, "verdict", "judgment record"));
  }
  return record;
}

}  // namespace cqot
