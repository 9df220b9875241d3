// Command-line front end. Links only the shared C API plus vendored
// header-only helpers for argument and JSON handling.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cqot/cqot.h"

using nlohmann::json;

namespace {

cqot_engine* g_engine = nullptr;

void handle_interrupt(int) {
  if (g_engine != nullptr) cqot_engine_request_abort(g_engine);
}

int exit_code_for(cqot_status status) {
  return (status == CQOT_ERR_CONFIG || status == CQOT_ERR_AUTH) ? 2 : 1;
}

[[noreturn]] void die(cqot_status status, const std::string& context) {
  std::cerr << "error (" << cqot_status_name(status) << "): " << context;
  const char* detail = cqot_last_error();
  if (detail != nullptr && *detail != '\0') std::cerr << ": " << detail;
  std::cerr << '\n';
  std::exit(exit_code_for(status));
}

std::string take_string(char* owned) {
  std::string value = owned == nullptr ? "" : owned;
  cqot_string_free(owned);
  return value;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << path << '\n';
    std::exit(2);
  }
  std::ostringstream content;
  content << in.rdbuf();
  return content.str();
}

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::string current;
  for (char c : csv) {
    if (c == ',') {
      if (!current.empty()) out.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

struct CommonOptions {
  std::string config_path;
  std::string templates_dir;
  bool deterministic = false;
};

void add_common_options(CLI::App* app, CommonOptions& options) {
  app->add_option("--config", options.config_path,
                  "engine config file (profiles, policy, templates dir)");
  app->add_option("--templates", options.templates_dir,
                  "prompt template directory (overrides config)");
  app->add_flag("--deterministic", options.deterministic,
                "fixed clock for reproducible records (scripted runs)");
}

struct EngineHandle {
  cqot_engine* engine = nullptr;
  ~EngineHandle() { cqot_engine_free(engine); }
};

struct BackendHandle {
  cqot_backend* backend = nullptr;
  ~BackendHandle() { cqot_backend_free(backend); }
};

struct StoreHandle {
  cqot_store* store = nullptr;
  ~StoreHandle() { cqot_store_free(store); }
};

cqot_engine* make_engine(const CommonOptions& options) {
  json config = json::object();
  if (!options.config_path.empty()) {
    config = json::parse(read_file(options.config_path), nullptr, false);
    if (config.is_discarded() || !config.is_object()) {
      std::cerr << "error: " << options.config_path << " is not a JSON object\n";
      std::exit(2);
    }
  }
  if (!options.templates_dir.empty()) config["templates_dir"] = options.templates_dir;
  if (options.deterministic) config["clock"] = "fixed";

  cqot_engine* engine = nullptr;
  const cqot_status status = cqot_engine_new(config.dump().c_str(), &engine);
  if (status != CQOT_OK) die(status, "engine setup failed");

  char* report_text = nullptr;
  if (cqot_engine_validate(engine, &report_text) == CQOT_OK) {
    const json report = json::parse(take_string(report_text));
    if (!report.empty()) {
      for (const auto& violation : report) {
        std::cerr << "config violation: " << violation.get<std::string>() << '\n';
      }
      cqot_engine_free(engine);
      std::exit(2);
    }
  }
  return engine;
}

cqot_backend* make_backend(cqot_engine* engine, const std::string& kind,
                           const std::string& script_path,
                           const std::string& profile) {
  cqot_backend* backend = nullptr;
  cqot_status status = CQOT_OK;
  if (kind == "scripted") {
    if (script_path.empty()) {
      std::cerr << "error: --backend scripted requires --script\n";
      std::exit(2);
    }
    status = cqot_backend_scripted_new(read_file(script_path).c_str(), &backend);
  } else if (kind == "http") {
    status = cqot_backend_http_new(engine, profile.c_str(), &backend);
  } else {
    std::cerr << "error: --backend must be http or scripted\n";
    std::exit(2);
  }
  if (status != CQOT_OK) die(status, "backend setup failed");
  return backend;
}

std::string profile_model_label(cqot_engine* engine, const std::string& profile) {
  char* profile_text = nullptr;
  const cqot_status status =
      cqot_engine_profile(engine, profile.c_str(), &profile_text);
  if (status != CQOT_OK) die(status, "unknown profile '" + profile + "'");
  const json j = json::parse(take_string(profile_text));
  const std::string model = j.value("model_id", "");
  return model.empty() ? j.value("name", "model") : model;
}

// Interactive gate: show the verdict, let the operator accept or override.
int interactive_decision(void*, const char* review_json, char* out, size_t len) {
  const json review = json::parse(review_json, nullptr, false);
  std::cerr << "\n[gate] iteration " << review.value("iteration", 0) << ": "
            << review.value("positives", 0) << " positive answers, computed "
            << review.value("computed", "?") << '\n';
  if (review.contains("verdict")) {
    for (const auto& answer : review["verdict"]["answers"]) {
      std::cerr << "  " << answer.value("index", 0) << ": "
                << answer.value("answer", "?") << '\n';
    }
  }
  std::cerr << "accept? [Enter=accept, p=proceed, r=retry, q=abort] " << std::flush;
  std::string line;
  if (!std::getline(std::cin, line)) return 0;
  if (line == "q") return 1;
  if (line == "p") std::snprintf(out, len, "proceed");
  else if (line == "r") std::snprintf(out, len, "retry");
  return 0;
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

struct RunArgs {
  CommonOptions common;
  std::string profile;
  std::string backend_kind = "http";
  std::string script_path;
  std::string modes_csv = "cqot";
  std::string prompt;
  std::string questions_path;
  std::string categories_csv = "reasoning,math";
  std::string out_dir;
  std::string run_id = "default";
  int workers = 1;
  bool interactive = false;
  bool dry_run = false;
  bool feedback = false;
  bool reformat_reask = false;
  double time_budget = 0.0;
};

void print_transcript_summary(const json& transcript) {
  std::cout << transcript.value("question_id", "?") << " turn "
            << transcript.value("turn_index", 0) << " ["
            << transcript.value("mode", "?") << "] "
            << transcript.value("status", "?") << ", iterations "
            << transcript["iterations"].size() << '\n';
  std::cout << "final answer:\n" << transcript.value("final_answer", "") << '\n';
}

int run_dry_run(cqot_engine* engine, const json& question) {
  const std::string query = question["turns"][0].get<std::string>();
  const json history = json::array(
      {{{"question", query}, {"answer", "<turn-1 answer placeholder>"}}});
  const std::vector<json> requests = {
      {{"step", "standard"}, {"query", query}},
      {{"step", "cot"}, {"query", query}},
      {{"step", "step1"}, {"query", query}},
      {{"step", "step2"}, {"query", query}, {"plan", "<plan placeholder>"}},
      {{"step", "step4"}, {"query", query}, {"plan", "<plan placeholder>"}},
      {{"step", "step1"},
       {"query", question["turns"][1].get<std::string>()},
       {"history", history}},
      {{"step", "judge_turn1"},
       {"query", query},
       {"answer", "<assistant answer placeholder>"}},
      {{"step", "judge_followup"}},
  };
  for (const auto& request : requests) {
    char* prompt_text = nullptr;
    const cqot_status status =
        cqot_engine_render(engine, request.dump().c_str(), &prompt_text);
    if (status != CQOT_OK) die(status, "render failed");
    std::cout << "----- " << request.value("step", "?") << " -----\n"
              << take_string(prompt_text) << '\n';
  }
  return 0;
}

int cmd_run(const RunArgs& args) {
  EngineHandle engine{make_engine(args.common)};
  g_engine = engine.engine;
  std::signal(SIGINT, handle_interrupt);

  json questions = json::array();
  if (!args.prompt.empty()) {
    questions.push_back({{"id", "adhoc"},
                         {"category", "reasoning"},
                         {"turns", json::array({args.prompt, "unused"})}});
  } else if (!args.questions_path.empty()) {
    char* questions_text = nullptr;
    const cqot_status status =
        cqot_questions_load(args.questions_path.c_str(),
                            args.categories_csv.c_str(), &questions_text);
    if (status != CQOT_OK) die(status, "loading questions failed");
    questions = json::parse(take_string(questions_text));
    if (questions.empty()) {
      std::cerr << "error: no questions matched the category filter\n";
      return 1;
    }
  } else {
    std::cerr << "error: provide --prompt or --questions\n";
    return 2;
  }

  if (args.dry_run) return run_dry_run(engine.engine, questions[0]);

  const std::vector<std::string> modes = split_csv(args.modes_csv);
  if (modes.empty()) {
    std::cerr << "error: --mode lists no modes\n";
    return 2;
  }

  if (args.interactive) {
    cqot_engine_set_decision_hook(engine.engine, interactive_decision, nullptr);
  }

  BackendHandle backend{make_backend(engine.engine, args.backend_kind,
                                     args.script_path, args.profile)};
  const std::string model = profile_model_label(engine.engine, args.profile);

  StoreHandle store;
  std::map<std::string, json> existing;  // key string -> transcript record
  if (!args.out_dir.empty()) {
    const cqot_status status = cqot_store_open(args.out_dir.c_str(), &store.store);
    if (status != CQOT_OK) die(status, "opening store failed");
    char* records_text = nullptr;
    if (cqot_store_list(store.store, "transcripts", &records_text) == CQOT_OK) {
      for (const auto& record : json::parse(take_string(records_text))) {
        const std::string key = record.value("question_id", "") + "|" +
                                std::to_string(record.value("turn_index", 0)) +
                                "|" + record.value("mode", "") + "|" +
                                record.value("model", "");
        existing[key] = record;
      }
    }
  }

  const auto record_key = [&](const json& question, int turn,
                              const std::string& mode) {
    return question.value("id", "") + "|" + std::to_string(turn) + "|" + mode +
           "|" + model;
  };
  const auto completed = [&](const std::string& key) {
    auto it = existing.find(key);
    return it != existing.end() &&
           it->second["transcript"].value("status", "") == "completed";
  };

  json options = json::object();
  options["feedback"] = args.feedback;
  options["reformat_reask"] = args.reformat_reask;
  if (args.time_budget > 0) options["time_budget_seconds"] = args.time_budget;

  std::mutex output_mutex;
  std::atomic<int> failures{0};
  std::atomic<size_t> next{0};
  const bool adhoc = !args.prompt.empty();
  const int workers = args.interactive ? 1 : std::max(1, args.workers);

  const auto persist = [&](const json& question, const json& transcript) {
    if (store.store == nullptr) return;
    json record = {{"schema_version", 1},
                   {"run_id", args.run_id},
                   {"question_id", transcript.value("question_id", "")},
                   {"category", question.value("category", "reasoning")},
                   {"turn_index", transcript.value("turn_index", 1)},
                   {"mode", transcript.value("mode", "")},
                   {"model", model},
                   {"profile", args.profile},
                   {"question_text",
                    question["turns"][transcript.value("turn_index", 1) - 1]},
                   {"transcript", transcript}};
    const cqot_status status =
        cqot_store_append_transcript(store.store, record.dump().c_str());
    if (status == CQOT_ERR_STORE_CONFLICT) {
      std::lock_guard<std::mutex> lock(output_mutex);
      std::cerr << "skip: already recorded under run id '" << args.run_id
                << "' (use a fresh --run-id to retry aborted work)\n";
    } else if (status != CQOT_OK) {
      die(status, "storing transcript failed");
    }
  };

  const auto work = [&]() {
    while (true) {
      const size_t index = next.fetch_add(1);
      if (index >= questions.size() * modes.size()) break;
      const json& question = questions[index / modes.size()];
      const std::string& mode = modes[index % modes.size()];

      try {
        if (adhoc) {
          json request = {{"question_id", "adhoc"},
                          {"turn_index", 1},
                          {"query", args.prompt},
                          {"mode", mode},
                          {"profile", args.profile},
                          {"options", options}};
          char* transcript_text = nullptr;
          const cqot_status status = cqot_run_turn(
              engine.engine, backend.backend, request.dump().c_str(),
              &transcript_text);
          if (status != CQOT_OK) die(status, "run failed");
          const json transcript = json::parse(take_string(transcript_text));
          {
            std::lock_guard<std::mutex> lock(output_mutex);
            print_transcript_summary(transcript);
          }
          persist(question, transcript);
          continue;
        }

        const std::string key1 = record_key(question, 1, mode);
        const std::string key2 = record_key(question, 2, mode);
        if (completed(key1) && completed(key2)) {
          std::lock_guard<std::mutex> lock(output_mutex);
          std::cerr << "skip " << question.value("id", "") << " [" << mode
                    << "]: already complete\n";
          continue;
        }

        std::vector<json> transcripts;
        if (completed(key1)) {
          // Resume: only turn 2 is missing.
          const json& turn1 = existing[key1];
          json request = {
              {"question_id", question.value("id", "")},
              {"turn_index", 2},
              {"query", question["turns"][1]},
              {"mode", mode},
              {"profile", args.profile},
              {"history",
               json::array({{{"question", turn1.value("question_text", "")},
                             {"answer",
                              turn1["transcript"].value("final_answer", "")}}})},
              {"options", options}};
          char* transcript_text = nullptr;
          const cqot_status status = cqot_run_turn(
              engine.engine, backend.backend, request.dump().c_str(),
              &transcript_text);
          if (status != CQOT_OK) die(status, "run failed");
          transcripts.push_back(json::parse(take_string(transcript_text)));
        } else {
          json request = {{"question", question},
                          {"mode", mode},
                          {"profile", args.profile},
                          {"options", options}};
          char* transcripts_text = nullptr;
          const cqot_status status = cqot_run_conversation(
              engine.engine, backend.backend, request.dump().c_str(),
              &transcripts_text);
          if (status != CQOT_OK) die(status, "run failed");
          for (const auto& transcript : json::parse(take_string(transcripts_text))) {
            transcripts.push_back(transcript);
          }
        }

        for (const auto& transcript : transcripts) {
          {
            std::lock_guard<std::mutex> lock(output_mutex);
            std::cerr << question.value("id", "") << " turn "
                      << transcript.value("turn_index", 0) << " [" << mode
                      << "] " << transcript.value("status", "?")
                      << ", iterations " << transcript["iterations"].size()
                      << '\n';
          }
          if (store.store == nullptr) {
            std::lock_guard<std::mutex> lock(output_mutex);
            std::cout << transcript.dump(2) << '\n';
          } else {
            persist(question, transcript);
          }
          if (transcript.value("status", "") == "aborted") failures.fetch_add(1);
        }
      } catch (const std::exception& error) {
        std::lock_guard<std::mutex> lock(output_mutex);
        std::cerr << "error: " << error.what() << '\n';
        failures.fetch_add(1);
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& thread : pool) thread.join();
  }

  return failures.load() == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// judge
// ---------------------------------------------------------------------------

struct JudgeArgs {
  CommonOptions common;
  std::string profile;
  std::string backend_kind = "http";
  std::string script_path;
  std::string out_dir;
  std::string questions_path;
  std::string followup = "off";
  std::string only;
  std::string run_id = "default";
  int max_attempts = 15;
  bool repeat_reference = false;
};

int cmd_judge(const JudgeArgs& args) {
  EngineHandle engine{make_engine(args.common)};
  g_engine = engine.engine;
  std::signal(SIGINT, handle_interrupt);

  if (args.out_dir.empty()) {
    std::cerr << "error: --out store directory is required\n";
    return 2;
  }
  if (args.repeat_reference && args.only.empty()) {
    std::cerr << "error: --repeat-reference needs --only <question_id[:turn]>\n";
    return 2;
  }

  StoreHandle store;
  cqot_status status = cqot_store_open(args.out_dir.c_str(), &store.store);
  if (status != CQOT_OK) die(status, "opening store failed");

  char* transcripts_text = nullptr;
  status = cqot_store_list(store.store, "transcripts", &transcripts_text);
  if (status != CQOT_OK) die(status, "listing transcripts failed");
  const json transcripts = json::parse(take_string(transcripts_text));
  if (transcripts.empty()) {
    std::cerr << "error: store holds no transcripts to judge\n";
    return 1;
  }

  char* judgments_text = nullptr;
  status = cqot_store_list(store.store, "judgments", &judgments_text);
  if (status != CQOT_OK) die(status, "listing judgments failed");
  std::set<std::string> judged;
  for (const auto& record : json::parse(take_string(judgments_text))) {
    judged.insert(record.value("question_id", "") + "|" +
                  std::to_string(record.value("turn_index", 0)) + "|" +
                  record.value("mode", "") + "|" + record.value("model", ""));
  }

  std::map<std::string, json> references;  // question id -> question
  if (!args.questions_path.empty()) {
    char* questions_text = nullptr;
    status = cqot_questions_load(args.questions_path.c_str(), "", &questions_text);
    if (status != CQOT_OK) die(status, "loading questions failed");
    for (const auto& question : json::parse(take_string(questions_text))) {
      references[question.value("id", "")] = question;
    }
  }

  std::string only_id = args.only;
  int only_turn = 0;
  if (const auto colon = args.only.find(':'); colon != std::string::npos) {
    only_id = args.only.substr(0, colon);
    only_turn = std::stoi(args.only.substr(colon + 1));
  }

  // Turn-1 transcripts by (question, mode, model) for second-turn context.
  std::map<std::string, json> first_turns;
  for (const auto& record : transcripts) {
    if (record.value("turn_index", 0) == 1) {
      first_turns[record.value("question_id", "") + "|" +
                  record.value("mode", "") + "|" + record.value("model", "")] =
          record;
    }
  }

  BackendHandle backend{make_backend(engine.engine, args.backend_kind,
                                     args.script_path, args.profile)};
  const std::string judge_model = profile_model_label(engine.engine, args.profile);

  int judged_count = 0;
  int failures = 0;
  for (const auto& record : transcripts) {
    const std::string qid = record.value("question_id", "");
    const int turn = record.value("turn_index", 0);
    if (!only_id.empty() && (qid != only_id || (only_turn != 0 && turn != only_turn))) {
      continue;
    }
    const std::string key = qid + "|" + std::to_string(turn) + "|" +
                            record.value("mode", "") + "|" +
                            record.value("model", "");
    if (judged.count(key) && !args.repeat_reference) continue;
    if (record["transcript"].value("status", "") != "completed") continue;

    json item = {{"question_id", qid},
                 {"turn_index", turn},
                 {"mode", record.value("mode", "")},
                 {"question_text", record.value("question_text", "")},
                 {"assistant_answer",
                  record["transcript"].value("final_answer", "")}};
    auto reference = references.find(qid);
    if (reference != references.end()) {
      const json answers =
          reference->second.value("reference_answers", json::array());
      if (turn <= static_cast<int>(answers.size())) {
        item["reference_answer"] = answers[turn - 1];
      }
    }

    json failure_record = {{"schema_version", 1},
                           {"run_id", args.run_id},
                           {"question_id", qid},
                           {"category", record.value("category", "reasoning")},
                           {"turn_index", turn},
                           {"mode", record.value("mode", "")},
                           {"model", record.value("model", "")},
                           {"judge_model", judge_model},
                           {"failed", true}};

    if (turn == 2) {
      auto first = first_turns.find(qid + "|" + record.value("mode", "") + "|" +
                                    record.value("model", ""));
      if (first == first_turns.end()) {
        std::cerr << qid << " turn 2: no turn-1 transcript for context\n";
        failure_record["failure_reason"] = "missing first-turn transcript";
        cqot_store_append_judgment(store.store, failure_record.dump().c_str());
        ++failures;
        continue;
      }
      item["first_turn"] = {
          {"question", first->second.value("question_text", "")},
          {"answer", first->second["transcript"].value("final_answer", "")}};
    }

    json request = {{"item", item},
                    {"profile", args.profile},
                    {"options",
                     {{"max_attempts", args.max_attempts},
                      {"followup", args.followup},
                      {"duplicate_reference", args.repeat_reference}}}};
    char* verdict_text = nullptr;
    status = cqot_judge_item(engine.engine, backend.backend,
                             request.dump().c_str(), &verdict_text);
    if (status == CQOT_ERR_NO_SCORE) {
      std::cerr << qid << " turn " << turn << ": " << cqot_last_error() << '\n';
      failure_record["failure_reason"] = cqot_last_error();
      cqot_store_append_judgment(store.store, failure_record.dump().c_str());
      ++failures;
      continue;
    }
    if (status != CQOT_OK) die(status, "judging failed");

    const json verdict = json::parse(take_string(verdict_text));
    json judgment = {{"schema_version", 1},
                     {"run_id", args.run_id},
                     {"question_id", qid},
                     {"category", record.value("category", "reasoning")},
                     {"turn_index", turn},
                     {"mode", record.value("mode", "")},
                     {"model", record.value("model", "")},
                     {"judge_model", judge_model},
                     {"failed", false},
                     {"verdict", verdict}};
    status = cqot_store_append_judgment(store.store, judgment.dump().c_str());
    if (status == CQOT_ERR_STORE_CONFLICT) {
      std::cerr << qid << " turn " << turn
                << ": judgment already recorded under run id '" << args.run_id
                << "' (use a fresh --run-id)\n";
      ++failures;
      continue;
    }
    if (status != CQOT_OK) die(status, "storing judgment failed");
    ++judged_count;
    std::cerr << qid << " turn " << turn << " [" << record.value("mode", "")
              << "]: score " << verdict.value("consensus_score", 0) << " ("
              << verdict.value("status", "?") << ", "
              << verdict["attempts"].size() << " attempts)\n";
  }

  std::cerr << "judged " << judged_count << " answers";
  if (failures > 0) std::cerr << ", " << failures << " failures";
  std::cerr << '\n';
  return failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

struct ReportArgs {
  CommonOptions common;
  std::string out_dir;
  std::string format = "text";
  std::string against = "standard,cot";
  std::string dest;
};

int cmd_report(const ReportArgs& args) {
  if (args.out_dir.empty()) {
    std::cerr << "error: --out store directory is required\n";
    return 2;
  }
  StoreHandle store;
  cqot_status status = cqot_store_open(args.out_dir.c_str(), &store.store);
  if (status != CQOT_OK) die(status, "opening store failed");

  json baselines = json::array();
  for (const auto& mode : split_csv(args.against)) baselines.push_back(mode);
  const json options = {{"baselines", baselines}};

  char* bundle_text = nullptr;
  status = cqot_report_render(store.store, options.dump().c_str(), &bundle_text);
  if (status != CQOT_OK) die(status, "report failed");
  const json bundle = json::parse(take_string(bundle_text));

  const std::string dest =
      args.dest.empty() ? args.out_dir + "/reports" : args.dest;
  std::filesystem::create_directories(dest);
  const auto write = [&](const char* name, const std::string& content) {
    std::ofstream out(std::filesystem::path(dest) / name, std::ios::binary);
    out << content;
  };
  write("report.txt", bundle.value("text", ""));
  write("means.csv", bundle.value("means_csv", ""));
  write("means.tsv", bundle.value("means_tsv", ""));
  write("percent.csv", bundle.value("percent_csv", ""));
  write("percent.tsv", bundle.value("percent_tsv", ""));

  if (args.format == "csv") {
    std::cout << bundle.value("means_csv", "") << '\n'
              << bundle.value("percent_csv", "");
  } else if (args.format == "tsv") {
    std::cout << bundle.value("means_tsv", "") << '\n'
              << bundle.value("percent_tsv", "");
  } else {
    std::cout << bundle.value("text", "");
  }
  std::cerr << "report written to " << dest << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critical-questions-of-thought pipeline runner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cqot_version());

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "execute pipelines over questions");
  add_common_options(run, run_args.common);
  run->add_option("--profile", run_args.profile, "provider profile name");
  run->add_option("--backend", run_args.backend_kind, "http or scripted");
  run->add_option("--script", run_args.script_path, "scripted backend JSON file");
  run->add_option("--mode", run_args.modes_csv,
                  "comma list of standard,cot,step1_4,cqot");
  run->add_option("--prompt", run_args.prompt, "single ad-hoc prompt");
  run->add_option("--questions", run_args.questions_path, "question JSONL file");
  run->add_option("--categories", run_args.categories_csv, "category filter");
  run->add_option("--out", run_args.out_dir, "run store directory");
  run->add_option("--run-id", run_args.run_id, "run identifier for the store");
  run->add_option("--workers", run_args.workers, "parallel questions");
  run->add_option("--time-budget", run_args.time_budget,
                  "wall-clock budget per turn, seconds");
  run->add_flag("--interactive-verify", run_args.interactive,
                "pause at every gate decision for human approval");
  run->add_flag("--dry-run", run_args.dry_run,
                "render prompts for the first question, no network");
  run->add_flag("--feedback", run_args.feedback,
                "feed failed question indices into the next plan");
  run->add_flag("--reformat-reask", run_args.reformat_reask,
                "stricter re-ask when most answers are unparseable");

  JudgeArgs judge_args;
  CLI::App* judge = app.add_subcommand("judge", "grade unjudged transcripts");
  add_common_options(judge, judge_args.common);
  judge->add_option("--profile", judge_args.profile, "judge profile name");
  judge->add_option("--backend", judge_args.backend_kind, "http or scripted");
  judge->add_option("--script", judge_args.script_path,
                    "scripted backend JSON file");
  judge->add_option("--out", judge_args.out_dir, "run store directory");
  judge->add_option("--questions", judge_args.questions_path,
                    "question file for reference answers");
  judge->add_option("--followup", judge_args.followup, "off, manual or heuristic");
  judge->add_option("--only", judge_args.only, "question id or id:turn filter");
  judge->add_option("--run-id", judge_args.run_id, "run identifier");
  judge->add_option("--max-attempts", judge_args.max_attempts,
                    "consensus attempt cap");
  judge->add_flag("--repeat-reference", judge_args.repeat_reference,
                  "re-judge with the reference answer duplicated");

  ReportArgs report_args;
  CLI::App* report = app.add_subcommand("report", "render aggregate tables");
  add_common_options(report, report_args.common);
  report->add_option("--out", report_args.out_dir, "run store directory");
  report->add_option("--format", report_args.format, "text, csv or tsv");
  report->add_option("--against", report_args.against,
                     "baselines for the percentage table");
  report->add_option("--dest", report_args.dest,
                     "report output directory (default <store>/reports)");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(run_args);
  if (judge->parsed()) return cmd_judge(judge_args);
  if (report->parsed()) return cmd_report(report_args);
  return 2;
}
