#pragma once

#include <json.hpp>

#include "cqot/bench.hpp"
#include "cqot/judging.hpp"
#include "cqot/model.hpp"
#include "cqot/transcript.hpp"
#include "cqot/verifier.hpp"

// JSON encodings for everything that crosses a file or API boundary.
// Object keys are emitted in sorted order, so serialization is deterministic.

namespace cqot {

using nlohmann::json;

json to_json(const SamplingParams& params);
SamplingParams sampling_params_from_json(const json& j);

json to_json(const ProviderProfile& profile);
ProviderProfile provider_profile_from_json(const json& j);

json to_json(const LoopPolicy& policy);
LoopPolicy loop_policy_from_json(const json& j);

json to_json(const CriticalQuestion& question);
CriticalQuestion critical_question_from_json(const json& j);

json to_json(const Catalog& catalog);
Catalog catalog_from_json(const json& j);

json to_json(const BenchQuestion& question);
BenchQuestion bench_question_from_json(const json& j);

json to_json(const Exchange& exchange);
Exchange exchange_from_json(const json& j);

json to_json(const CqVerdict& verdict);
CqVerdict cq_verdict_from_json(const json& j);

json to_json(const Decision& decision);
Decision decision_from_json(const json& j);

json to_json(const PipelineTranscript& transcript);
PipelineTranscript pipeline_transcript_from_json(const json& j);

json to_json(const JudgeVerdict& verdict);
JudgeVerdict judge_verdict_from_json(const json& j);

json to_json(const TranscriptRecord& record);
TranscriptRecord transcript_record_from_json(const json& j);

json to_json(const JudgmentRecord& record);
JudgmentRecord judgment_record_from_json(const json& j);

/// Parses text that must be a JSON object; raises SchemaError otherwise.
json parse_json_object(const std::string& text, const std::string& what);

}  // namespace cqot
