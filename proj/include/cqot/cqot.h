/*
 * C API for the cqot engine: run plan/critique/answer pipelines over any
 * chat-completion backend, grade the answers with a judge model, and
 * aggregate the scores.
 *
 * Conventions:
 *   - Every function returns a cqot_status; CQOT_OK is 0.
 *   - Objects are opaque handles created by the _new and _open constructors
 *     and released by the matching _free. Handles are not reference counted.
 *   - Structured inputs and outputs are UTF-8 JSON strings. Output strings
 *     (char** out parameters) are owned by the caller and must be released
 *     with cqot_string_free().
 *   - On failure, cqot_last_error() returns a message for the calling thread.
 */

#ifndef CQOT_H
#define CQOT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cqot_status {
  CQOT_OK = 0,
  CQOT_ERR_INVALID_ARGUMENT = 1,
  CQOT_ERR_CONFIG = 2,
  CQOT_ERR_AUTH = 3,
  CQOT_ERR_RATE_LIMITED = 4,
  CQOT_ERR_TRANSPORT = 5,
  CQOT_ERR_EMPTY_COMPLETION = 6,
  CQOT_ERR_NO_SCORE = 7,
  CQOT_ERR_SCHEMA = 8,
  CQOT_ERR_DUPLICATE = 9,
  CQOT_ERR_EMPTY_STORE = 10,
  CQOT_ERR_STORE_CONFLICT = 11,
  CQOT_ERR_IO = 12,
  CQOT_ERR_ABORTED = 13,
  CQOT_ERR_INTERNAL = 14
} cqot_status;

typedef struct cqot_engine cqot_engine;
typedef struct cqot_backend cqot_backend;
typedef struct cqot_store cqot_store;

const char* cqot_version(void);
const char* cqot_status_name(cqot_status status);

/* Message describing the calling thread's most recent failure. The pointer
 * stays valid until the next failing call on the same thread. */
const char* cqot_last_error(void);

void cqot_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Engine: profiles, gate policy, question catalog, prompt templates. */

/* config_json may be NULL or "" for built-in defaults. Schema:
 * {"profiles":[{"name","endpoint","model_id","auth_env_var",
 *               "creative_params":{"temperature","top_p","max_new_tokens"},
 *               "objective_params":{...}}],
 *  "default_profile":"name", "policy":{"num_cqs","early_threshold",
 *  "late_threshold","early_max_iterations","total_max_iterations"},
 *  "templates_dir":"path", "critical_questions":[{"index","text",
 *  "toulmin_tags":[...]}], "clock":"system"|"fixed", "timeout_seconds":120,
 *  "verbosity_keywords":[...]} */
cqot_status cqot_engine_new(const char* config_json, cqot_engine** out);
void cqot_engine_free(cqot_engine* engine);

/* JSON array of violation strings; empty array means valid. */
cqot_status cqot_engine_validate(cqot_engine* engine, char** out_report_json);

/* The active critical-question catalog as a JSON array. */
cqot_status cqot_engine_catalog(cqot_engine* engine, char** out_catalog_json);

/* The named profile (default profile when NULL/"") as a JSON object. */
cqot_status cqot_engine_profile(cqot_engine* engine, const char* profile_name,
                                char** out_profile_json);

/* Renders one prompt without any network traffic (dry runs). request_json:
 * {"step":"standard|cot|step1|step2|step4|judge_turn1|judge_turn2|
 *   judge_followup", "query":"...", "plan":"...", "history":[{"question",
 *   "answer"}], "answer":"...", "reference_answer":"...",
 *   "first_turn":{"question","answer"}} — fields as the step requires. */
cqot_status cqot_engine_render(cqot_engine* engine, const char* request_json,
                               char** out_prompt_text);

/* Human gate override. review_json carries {"iteration","positives",
 * "computed","verdict"}; the hook writes "proceed" or "retry" into
 * out_decision (empty keeps the computed decision) and returns 0, or
 * returns nonzero to abort the run. */
typedef int (*cqot_decision_hook)(void* user_data, const char* review_json,
                                  char* out_decision, size_t out_decision_len);
cqot_status cqot_engine_set_decision_hook(cqot_engine* engine,
                                          cqot_decision_hook hook,
                                          void* user_data);

/* Makes in-flight and future runs on this engine finish as aborted.
 * Safe to call from a signal handler. */
cqot_status cqot_engine_request_abort(cqot_engine* engine);
cqot_status cqot_engine_reset_abort(cqot_engine* engine);

/* ------------------------------------------------------------------ */
/* Backends.                                                           */

/* Live HTTP backend for the named profile (default profile when NULL/"").
 * Fails with CQOT_ERR_AUTH when the profile's auth env var is unset. */
cqot_status cqot_backend_http_new(cqot_engine* engine, const char* profile_name,
                                  cqot_backend** out);

/* Deterministic scripted backend; see the script JSON schema in the docs:
 * {"entries":[{"step","iteration","turn","content"}],
 *  "defaults":[{"step","content"}]} */
cqot_status cqot_backend_scripted_new(const char* script_json, cqot_backend** out);

void cqot_backend_free(cqot_backend* backend);

/* Number of completed requests this backend has served. */
cqot_status cqot_backend_request_count(cqot_backend* backend, size_t* out_count);

/* Recorded requests (scripted backend only) as a JSON array. */
cqot_status cqot_backend_request_log(cqot_backend* backend, char** out_log_json);

/* ------------------------------------------------------------------ */
/* Runs.                                                               */

/* request_json: {"question_id","turn_index","query","mode",
 *  "history":[{"question","answer"}], "profile":"name",
 *  "options":{"feedback":false,"reformat_reask":false,
 *             "time_budget_seconds":0}}
 * Returns the transcript as JSON. */
cqot_status cqot_run_turn(cqot_engine* engine, cqot_backend* backend,
                          const char* request_json, char** out_transcript_json);

/* request_json: {"question":{"id","category","turns":[..],
 *  "reference_answers":[..]}, "mode":"...", "profile":"name",
 *  "options":{...}}. Returns a JSON array of two transcripts (one when the
 *  first turn aborts). */
cqot_status cqot_run_conversation(cqot_engine* engine, cqot_backend* backend,
                                  const char* request_json,
                                  char** out_transcripts_json);

/* ------------------------------------------------------------------ */
/* Judging.                                                            */

/* request_json: {"item":{"question_id","turn_index","mode","question_text",
 *  "reference_answer","assistant_answer","first_turn":{"question","answer"}},
 *  "profile":"judge-profile", "options":{"max_attempts":15,
 *  "followup":"off|manual|heuristic", "duplicate_reference":false}}
 * Returns the judge verdict as JSON. */
cqot_status cqot_judge_item(cqot_engine* engine, cqot_backend* backend,
                            const char* request_json, char** out_verdict_json);

/* ------------------------------------------------------------------ */
/* Question files.                                                     */

/* categories_csv like "reasoning,math"; NULL/"" keeps that default.
 * Returns a JSON array of questions ordered by id. */
cqot_status cqot_questions_load(const char* path, const char* categories_csv,
                                char** out_questions_json);

/* ------------------------------------------------------------------ */
/* Run store.                                                          */

cqot_status cqot_store_open(const char* root, cqot_store** out);
void cqot_store_free(cqot_store* store);

/* record_json: the transcript/judgment record envelope; see docs. */
cqot_status cqot_store_append_transcript(cqot_store* store,
                                         const char* record_json);
cqot_status cqot_store_append_judgment(cqot_store* store,
                                       const char* record_json);

/* kind: "transcripts" or "judgments";
 * key_json: {"question_id","turn_index","mode","model"}. */
cqot_status cqot_store_has(cqot_store* store, const char* kind,
                           const char* key_json, int* out_exists);

/* All records of `kind` in append order, as a JSON array. */
cqot_status cqot_store_list(cqot_store* store, const char* kind,
                            char** out_records_json);

/* ------------------------------------------------------------------ */
/* Reporting.                                                          */

/* options_json: {"baselines":["standard","cot"]} (optional). Returns
 * {"text","means_csv","means_tsv","percent_csv","percent_tsv"}. Fails with
 * CQOT_ERR_EMPTY_STORE when the store holds no judgments. */
cqot_status cqot_report_render(cqot_store* store, const char* options_json,
                               char** out_bundle_json);

#ifdef __cplusplus
}
#endif

#endif /* CQOT_H */
