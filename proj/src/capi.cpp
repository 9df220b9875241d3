#include "cqot/cqot.h"

#include <cstring>
#include <string>

#include "cqot/bench.hpp"
#include "cqot/engine.hpp"
#include "cqot/errors.hpp"
#include "cqot/gateway.hpp"
#include "cqot/json_io.hpp"
#include "cqot/judging.hpp"
#include "cqot/orchestrator.hpp"
#include "cqot/prompting.hpp"
#include "cqot/version.hpp"

using cqot::CqotError;
using cqot::ErrorKind;
using cqot::json;

struct cqot_engine {
  cqot::Engine engine;
};

struct cqot_backend {
  std::shared_ptr<cqot::Backend> backend;
};

struct cqot_store {
  cqot::RunStore store;
};

namespace {

thread_local std::string t_last_error;

cqot_status status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::EmptyQuery:
    case ErrorKind::EmptyPlan:
    case ErrorKind::EmptyAnswer:
    case ErrorKind::MissingFirstTurn:
    case ErrorKind::OutOfRange:
    case ErrorKind::EmptyInput:
    case ErrorKind::NonpositiveBase:
    case ErrorKind::InsufficientSamples:
      return CQOT_ERR_INVALID_ARGUMENT;
    case ErrorKind::ConfigError: return CQOT_ERR_CONFIG;
    case ErrorKind::AuthError: return CQOT_ERR_AUTH;
    case ErrorKind::RateLimited: return CQOT_ERR_RATE_LIMITED;
    case ErrorKind::TransportError: return CQOT_ERR_TRANSPORT;
    case ErrorKind::EmptyCompletion: return CQOT_ERR_EMPTY_COMPLETION;
    case ErrorKind::NoScoreFound: return CQOT_ERR_NO_SCORE;
    case ErrorKind::SchemaError: return CQOT_ERR_SCHEMA;
    case ErrorKind::DuplicateId: return CQOT_ERR_DUPLICATE;
    case ErrorKind::EmptyStore: return CQOT_ERR_EMPTY_STORE;
    case ErrorKind::StoreConflict: return CQOT_ERR_STORE_CONFLICT;
    case ErrorKind::IoError: return CQOT_ERR_IO;
    case ErrorKind::Aborted: return CQOT_ERR_ABORTED;
  }
  return CQOT_ERR_INTERNAL;
}

template <typename Fn>
cqot_status guarded(Fn&& fn) {
  try {
    fn();
    return CQOT_OK;
  } catch (const CqotError& error) {
    t_last_error = error.what();
    return status_for(error.kind());
  } catch (const std::exception& error) {
    t_last_error = error.what();
    return CQOT_ERR_INTERNAL;
  } catch (...) {
    t_last_error = "unknown failure";
    return CQOT_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& value) {
  char* out = static_cast<char*>(std::malloc(value.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, value.c_str(), value.size() + 1);
  return out;
}

void require(bool condition, const char* message) {
  if (!condition) cqot::raise(ErrorKind::InvalidArgument, message);
}

cqot::History history_from_json(const json& j) {
  cqot::History history;
  for (const auto& entry : j) history.push_back(cqot::exchange_from_json(entry));
  return history;
}

cqot::RunOptions run_options_from_json(const json& j) {
  cqot::RunOptions options;
  if (!j.is_object()) return options;
  options.feedback = j.value("feedback", false);
  options.reformat_reask = j.value("reformat_reask", false);
  if (j.contains("time_budget_seconds")) {
    const double budget = j.at("time_budget_seconds").get<double>();
    if (budget > 0) options.time_budget_seconds = budget;
  }
  return options;
}

cqot::Gateway make_gateway(cqot_engine* engine, cqot_backend* backend) {
  return cqot::Gateway(backend->backend, engine->engine.retry());
}

cqot::ScriptedBackend* as_scripted(cqot_backend* backend) {
  auto* scripted = dynamic_cast<cqot::ScriptedBackend*>(backend->backend.get());
  if (scripted == nullptr) {
    cqot::raise(ErrorKind::InvalidArgument,
                "operation needs a scripted backend");
  }
  return scripted;
}

}  // namespace

extern "C" {

const char* cqot_version(void) { return CQOT_VERSION_STRING; }

const char* cqot_status_name(cqot_status status) {
  switch (status) {
    case CQOT_OK: return "ok";
    case CQOT_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case CQOT_ERR_CONFIG: return "config";
    case CQOT_ERR_AUTH: return "auth";
    case CQOT_ERR_RATE_LIMITED: return "rate_limited";
    case CQOT_ERR_TRANSPORT: return "transport";
    case CQOT_ERR_EMPTY_COMPLETION: return "empty_completion";
    case CQOT_ERR_NO_SCORE: return "no_score";
    case CQOT_ERR_SCHEMA: return "schema";
    case CQOT_ERR_DUPLICATE: return "duplicate";
    case CQOT_ERR_EMPTY_STORE: return "empty_store";
    case CQOT_ERR_STORE_CONFLICT: return "store_conflict";
    case CQOT_ERR_IO: return "io";
    case CQOT_ERR_ABORTED: return "aborted";
    case CQOT_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* cqot_last_error(void) { return t_last_error.c_str(); }

void cqot_string_free(char* s) { std::free(s); }

cqot_status cqot_engine_new(const char* config_json, cqot_engine** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be null");
    const std::string config = config_json == nullptr ? "" : config_json;
    *out = new cqot_engine{cqot::Engine::from_json_text(config)};
  });
}

void cqot_engine_free(cqot_engine* engine) { delete engine; }

cqot_status cqot_engine_validate(cqot_engine* engine, char** out_report_json) {
  return guarded([&] {
    require(engine != nullptr && out_report_json != nullptr,
            "engine and out must not be null");
    json report = json::array();
    for (const auto& violation : engine->engine.validate().violations) {
      report.push_back(violation);
    }
    *out_report_json = dup_string(report.dump());
  });
}

cqot_status cqot_engine_catalog(cqot_engine* engine, char** out_catalog_json) {
  return guarded([&] {
    require(engine != nullptr && out_catalog_json != nullptr,
            "engine and out must not be null");
    *out_catalog_json = dup_string(cqot::to_json(engine->engine.catalog()).dump());
  });
}

cqot_status cqot_engine_profile(cqot_engine* engine, const char* profile_name,
                                char** out_profile_json) {
  return guarded([&] {
    require(engine != nullptr && out_profile_json != nullptr,
            "engine and out must not be null");
    const std::string name = profile_name == nullptr ? "" : profile_name;
    *out_profile_json =
        dup_string(cqot::to_json(engine->engine.profile(name)).dump());
  });
}

cqot_status cqot_engine_render(cqot_engine* engine, const char* request_json,
                               char** out_prompt_text) {
  return guarded([&] {
    require(engine != nullptr && request_json != nullptr &&
                out_prompt_text != nullptr,
            "engine, request and out must not be null");
    const json j = cqot::parse_json_object(request_json, "render request");
    const cqot::StepKind step =
        cqot::step_from_string(j.at("step").get<std::string>());
    const cqot::Engine& eng = engine->engine;
    const std::string query = j.value("query", "");
    cqot::History history;
    if (j.contains("history")) history = history_from_json(j.at("history"));

    cqot::RenderedPrompt prompt;
    switch (step) {
      case cqot::StepKind::Standard:
        prompt = cqot::render_standard(eng.templates(), query, history);
        break;
      case cqot::StepKind::CoT:
        prompt = cqot::render_cot(eng.templates(), query, history);
        break;
      case cqot::StepKind::Step1: {
        cqot::Step1Options options;
        if (j.contains("failed_cq_indices")) {
          options.failed_cq_indices =
              j.at("failed_cq_indices").get<std::vector<int>>();
        }
        prompt = cqot::render_step1(eng.templates(), query, history, options);
        break;
      }
      case cqot::StepKind::Step2:
        prompt = cqot::render_step2(eng.templates(), query,
                                    {j.value("plan", ""), 1}, eng.catalog());
        break;
      case cqot::StepKind::Step4:
        prompt = cqot::render_step4(eng.templates(), query,
                                    {j.value("plan", ""), 1}, history);
        break;
      case cqot::StepKind::JudgeTurn1:
      case cqot::StepKind::JudgeTurn2: {
        cqot::JudgeInputs inputs;
        inputs.question_text = query;
        inputs.assistant_answer = j.value("answer", "");
        if (j.contains("reference_answer")) {
          inputs.reference_answer = j.at("reference_answer").get<std::string>();
        }
        if (j.contains("first_turn")) {
          inputs.first_turn = cqot::exchange_from_json(j.at("first_turn"));
        }
        prompt = cqot::render_judge(eng.templates(), inputs,
                                    step == cqot::StepKind::JudgeTurn1 ? 1 : 2);
        break;
      }
      case cqot::StepKind::JudgeFollowup:
        prompt = cqot::render_judge_followup(eng.templates());
        break;
    }
    *out_prompt_text = dup_string(prompt.text);
  });
}

cqot_status cqot_engine_set_decision_hook(cqot_engine* engine,
                                          cqot_decision_hook hook,
                                          void* user_data) {
  return guarded([&] {
    require(engine != nullptr, "engine must not be null");
    if (hook == nullptr) {
      engine->engine.set_decision_hook(nullptr);
      return;
    }
    engine->engine.set_decision_hook(
        [hook, user_data](const cqot::CqVerdict& verdict,
                          const cqot::Decision& computed) -> cqot::Decision {
          json review = {{"iteration", computed.iteration},
                         {"positives", computed.positives},
                         {"computed", cqot::to_string(computed.kind)},
                         {"verdict", cqot::to_json(verdict)}};
          char buffer[32] = {0};
          const std::string review_text = review.dump();
          if (hook(user_data, review_text.c_str(), buffer, sizeof(buffer)) != 0) {
            cqot::raise(ErrorKind::Aborted, "run aborted by decision hook");
          }
          cqot::Decision decision = computed;
          const std::string choice = buffer;
          if (choice == "proceed") decision.kind = cqot::DecisionKind::Proceed;
          else if (choice == "retry") decision.kind = cqot::DecisionKind::Retry;
          return decision;
        });
  });
}

cqot_status cqot_engine_request_abort(cqot_engine* engine) {
  if (engine == nullptr) return CQOT_ERR_INVALID_ARGUMENT;
  engine->engine.request_abort();  // just an atomic flag; signal-safe
  return CQOT_OK;
}

cqot_status cqot_engine_reset_abort(cqot_engine* engine) {
  if (engine == nullptr) return CQOT_ERR_INVALID_ARGUMENT;
  engine->engine.reset_abort();
  return CQOT_OK;
}

cqot_status cqot_backend_http_new(cqot_engine* engine, const char* profile_name,
                                  cqot_backend** out) {
  return guarded([&] {
    require(engine != nullptr && out != nullptr,
            "engine and out must not be null");
    const std::string name = profile_name == nullptr ? "" : profile_name;
    const cqot::ProviderProfile& profile = engine->engine.profile(name);
    *out = new cqot_backend{std::make_shared<cqot::HttpBackend>(
        profile, engine->engine.http_options())};
  });
}

cqot_status cqot_backend_scripted_new(const char* script_json, cqot_backend** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be null");
    const std::string script = script_json == nullptr ? "{}" : script_json;
    *out = new cqot_backend{cqot::ScriptedBackend::from_json_text(script)};
  });
}

void cqot_backend_free(cqot_backend* backend) { delete backend; }

cqot_status cqot_backend_request_count(cqot_backend* backend, size_t* out_count) {
  return guarded([&] {
    require(backend != nullptr && out_count != nullptr,
            "backend and out must not be null");
    *out_count = as_scripted(backend)->request_count();
  });
}

cqot_status cqot_backend_request_log(cqot_backend* backend, char** out_log_json) {
  return guarded([&] {
    require(backend != nullptr && out_log_json != nullptr,
            "backend and out must not be null");
    json log = json::array();
    for (const auto& request : as_scripted(backend)->requests()) {
      json messages = json::array();
      for (const auto& message : request.messages) {
        messages.push_back({{"role", cqot::to_string(message.role)},
                            {"content", message.content}});
      }
      json entry = {{"model", request.model_id}, {"messages", messages}};
      if (request.tag) {
        entry["step"] = cqot::to_string(request.tag->step);
        entry["iteration"] = request.tag->iteration;
        entry["turn"] = request.tag->turn;
      }
      log.push_back(entry);
    }
    *out_log_json = dup_string(log.dump());
  });
}

cqot_status cqot_run_turn(cqot_engine* engine, cqot_backend* backend,
                          const char* request_json, char** out_transcript_json) {
  return guarded([&] {
    require(engine != nullptr && backend != nullptr && request_json != nullptr &&
                out_transcript_json != nullptr,
            "engine, backend, request and out must not be null");
    const json j = cqot::parse_json_object(request_json, "run request");
    cqot::RunRequest request;
    request.question_id = j.value("question_id", "adhoc");
    request.turn_index = j.value("turn_index", 1);
    request.query = j.at("query").get<std::string>();
    if (j.contains("history")) request.history = history_from_json(j.at("history"));
    const cqot::TechniqueMode mode =
        cqot::mode_from_string(j.at("mode").get<std::string>());
    const cqot::ProviderProfile& profile =
        engine->engine.profile(j.value("profile", ""));
    const cqot::RunOptions options =
        run_options_from_json(j.value("options", json::object()));

    cqot::Gateway gateway = make_gateway(engine, backend);
    cqot::PipelineTranscript transcript =
        cqot::run_turn(engine->engine, gateway, profile, mode, request, options);
    *out_transcript_json = dup_string(cqot::to_json(transcript).dump());
  });
}

cqot_status cqot_run_conversation(cqot_engine* engine, cqot_backend* backend,
                                  const char* request_json,
                                  char** out_transcripts_json) {
  return guarded([&] {
    require(engine != nullptr && backend != nullptr && request_json != nullptr &&
                out_transcripts_json != nullptr,
            "engine, backend, request and out must not be null");
    const json j = cqot::parse_json_object(request_json, "conversation request");
    const cqot::BenchQuestion question =
        cqot::bench_question_from_json(j.at("question"));
    const cqot::TechniqueMode mode =
        cqot::mode_from_string(j.at("mode").get<std::string>());
    const cqot::ProviderProfile& profile =
        engine->engine.profile(j.value("profile", ""));
    const cqot::RunOptions options =
        run_options_from_json(j.value("options", json::object()));

    cqot::Gateway gateway = make_gateway(engine, backend);
    json out = json::array();
    for (const auto& transcript :
         cqot::run_conversation(engine->engine, gateway, profile, question, mode,
                                options)) {
      out.push_back(cqot::to_json(transcript));
    }
    *out_transcripts_json = dup_string(out.dump());
  });
}

cqot_status cqot_judge_item(cqot_engine* engine, cqot_backend* backend,
                            const char* request_json, char** out_verdict_json) {
  return guarded([&] {
    require(engine != nullptr && backend != nullptr && request_json != nullptr &&
                out_verdict_json != nullptr,
            "engine, backend, request and out must not be null");
    const json j = cqot::parse_json_object(request_json, "judge request");
    const json& item_json = j.at("item");

    cqot::JudgeItem item;
    item.question_id = item_json.at("question_id").get<std::string>();
    item.turn_index = item_json.value("turn_index", 1);
    item.mode = cqot::mode_from_string(item_json.at("mode").get<std::string>());
    item.question_text = item_json.at("question_text").get<std::string>();
    if (item_json.contains("reference_answer")) {
      item.reference_answer =
          item_json.at("reference_answer").get<std::string>();
    }
    item.assistant_answer = item_json.at("assistant_answer").get<std::string>();
    if (item_json.contains("first_turn")) {
      item.first_turn = cqot::exchange_from_json(item_json.at("first_turn"));
    }

    cqot::JudgeOptions options;
    if (j.contains("options") && j.at("options").is_object()) {
      const json& options_json = j.at("options");
      options.max_attempts = options_json.value("max_attempts", 15);
      options.followup =
          cqot::followup_from_string(options_json.value("followup", "off"));
      options.duplicate_reference =
          options_json.value("duplicate_reference", false);
    }

    const cqot::ProviderProfile& profile =
        engine->engine.profile(j.value("profile", ""));
    cqot::Gateway gateway = make_gateway(engine, backend);
    cqot::JudgeVerdict verdict = cqot::score_with_consensus(
        engine->engine, gateway, profile, item, options);
    *out_verdict_json = dup_string(cqot::to_json(verdict).dump());
  });
}

cqot_status cqot_questions_load(const char* path, const char* categories_csv,
                                char** out_questions_json) {
  return guarded([&] {
    require(path != nullptr && out_questions_json != nullptr,
            "path and out must not be null");
    std::set<cqot::Category> categories;
    const std::string csv =
        categories_csv == nullptr || *categories_csv == '\0' ? "reasoning,math"
                                                             : categories_csv;
    std::size_t start = 0;
    while (start <= csv.size()) {
      const std::size_t comma = csv.find(',', start);
      const std::string token =
          csv.substr(start, comma == std::string::npos ? csv.size() - start
                                                       : comma - start);
      if (!token.empty()) categories.insert(cqot::category_from_string(token));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    json out = json::array();
    for (const auto& question : cqot::load_questions(path, categories)) {
      out.push_back(cqot::to_json(question));
    }
    *out_questions_json = dup_string(out.dump());
  });
}

cqot_status cqot_store_open(const char* root, cqot_store** out) {
  return guarded([&] {
    require(root != nullptr && out != nullptr, "root and out must not be null");
    *out = new cqot_store{cqot::RunStore(root)};
  });
}

void cqot_store_free(cqot_store* store) { delete store; }

cqot_status cqot_store_append_transcript(cqot_store* store,
                                         const char* record_json) {
  return guarded([&] {
    require(store != nullptr && record_json != nullptr,
            "store and record must not be null");
    store->store.append(cqot::transcript_record_from_json(
        cqot::parse_json_object(record_json, "transcript record")));
  });
}

cqot_status cqot_store_append_judgment(cqot_store* store,
                                       const char* record_json) {
  return guarded([&] {
    require(store != nullptr && record_json != nullptr,
            "store and record must not be null");
    store->store.append(cqot::judgment_record_from_json(
        cqot::parse_json_object(record_json, "judgment record")));
  });
}

cqot_status cqot_store_has(cqot_store* store, const char* kind,
                           const char* key_json, int* out_exists) {
  return guarded([&] {
    require(store != nullptr && kind != nullptr && key_json != nullptr &&
                out_exists != nullptr,
            "store, kind, key and out must not be null");
    const json j = cqot::parse_json_object(key_json, "record key");
    cqot::RecordKey key;
    key.question_id = j.at("question_id").get<std::string>();
    key.turn_index = j.at("turn_index").get<int>();
    key.mode = cqot::mode_from_string(j.at("mode").get<std::string>());
    key.model = j.at("model").get<std::string>();
    const std::string which = kind;
    if (which == "transcripts") {
      *out_exists = store->store.has_transcript(key) ? 1 : 0;
    } else if (which == "judgments") {
      *out_exists = store->store.has_judgment(key) ? 1 : 0;
    } else {
      cqot::raise(ErrorKind::InvalidArgument,
                  "kind must be 'transcripts' or 'judgments'");
    }
  });
}

cqot_status cqot_store_list(cqot_store* store, const char* kind,
                            char** out_records_json) {
  return guarded([&] {
    require(store != nullptr && kind != nullptr && out_records_json != nullptr,
            "store, kind and out must not be null");
    json out = json::array();
    const std::string which = kind;
    if (which == "transcripts") {
      for (const auto& record : store->store.transcripts()) {
        out.push_back(cqot::to_json(record));
      }
    } else if (which == "judgments") {
      for (const auto& record : store->store.judgments()) {
        out.push_back(cqot::to_json(record));
      }
    } else {
      cqot::raise(ErrorKind::InvalidArgument,
                  "kind must be 'transcripts' or 'judgments'");
    }
    *out_records_json = dup_string(out.dump());
  });
}

cqot_status cqot_report_render(cqot_store* store, const char* options_json,
                               char** out_bundle_json) {
  return guarded([&] {
    require(store != nullptr && out_bundle_json != nullptr,
            "store and out must not be null");
    cqot::ReportOptions options;
    if (options_json != nullptr && *options_json != '\0') {
      const json j = cqot::parse_json_object(options_json, "report options");
      if (j.contains("baselines")) {
        options.baselines.clear();
        for (const auto& name : j.at("baselines")) {
          options.baselines.push_back(
              cqot::mode_from_string(name.get<std::string>()));
        }
      }
    }
    const cqot::ReportBundle bundle =
        cqot::render_report(store->store, options);
    json out = {{"text", bundle.text},
                {"means_csv", bundle.means_csv},
                {"means_tsv", bundle.means_tsv},
                {"percent_csv", bundle.percent_csv},
                {"percent_tsv", bundle.percent_tsv}};
    *out_bundle_json = dup_string(out.dump());
  });
}

}  // extern "C"
