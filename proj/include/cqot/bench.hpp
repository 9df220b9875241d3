#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cqot/judging.hpp"
#include "cqot/model.hpp"
#include "cqot/transcript.hpp"

namespace cqot {

/// Identifies one result slot; at most one record per key and run id.
struct RecordKey {
  std::string question_id;
  int turn_index = 1;
  TechniqueMode mode = TechniqueMode::Standard;
  std::string model;

  auto operator<=>(const RecordKey&) const = default;
};

struct TranscriptRecord {
  int schema_version = 1;
  std::string run_id;
  std::string question_id;
  Category category = Category::Reasoning;
  int turn_index = 1;
  TechniqueMode mode = TechniqueMode::Standard;
  std::string model;
  std::string profile;
  std::string question_text;
  PipelineTranscript transcript;

  RecordKey key() const { return {question_id, turn_index, mode, model}; }
};

struct JudgmentRecord {
  int schema_version = 1;
  std::string run_id;
  std::string question_id;
  Category category = Category::Reasoning;
  int turn_index = 1;
  TechniqueMode mode = TechniqueMode::Standard;
  std::string model;
  std::string judge_model;
  bool failed = false;         // judge never produced a score
  std::string failure_reason;  // only when failed
  JudgeVerdict verdict;        // meaningful when !failed

  RecordKey key() const { return {question_id, turn_index, mode, model}; }
};

/// Append-only on-disk result store. Records live in line-delimited files
/// split per (model, mode, category); a key may appear at most once per run
/// id and lines are never rewritten. Appends are serialized through a single
/// writer lock.
class RunStore {
 public:
  explicit RunStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  void append(const TranscriptRecord& record);
  void append(const JudgmentRecord& record);

  bool has_transcript(const RecordKey& key) const;
  bool has_judgment(const RecordKey& key) const;

  /// All records in append order (across files, file paths sorted).
  std::vector<TranscriptRecord> transcripts() const;
  std::vector<JudgmentRecord> judgments() const;

  std::optional<TranscriptRecord> find_transcript(const RecordKey& key) const;

 private:
  std::filesystem::path record_path(const char* kind, const std::string& model,
                                    TechniqueMode mode, Category category) const;
  void append_line(const std::filesystem::path& path, const std::string& line);

  std::filesystem::path root_;
  mutable std::mutex write_mutex_;
  std::set<std::pair<RecordKey, std::string>> transcript_keys_;  // key + run id
  std::set<std::pair<RecordKey, std::string>> judgment_keys_;
};

/// Reads the question file: one JSON record per line with fields
/// {id, category, turns[2], reference_answers?}. Returns only the requested
/// categories, ordered by id. SchemaError carries the offending line number.
std::vector<BenchQuestion> load_questions(const std::filesystem::path& path,
                                          const std::set<Category>& categories);

/// Arithmetic mean of consensus scores, 2 decimals, half away from zero.
double mean_score(const std::vector<JudgeVerdict>& verdicts);
double mean_score(const std::vector<int>& scores);

/// 100 * (cqot - base) / base, 2 decimals, half away from zero.
double percent_improvement(double cqot_mean, double base_mean);

/// Mean of already-rounded cells, 2 decimals, half away from zero.
double column_average(const std::vector<double>& cells);

/// Sample standard deviation (n-1) over sqrt(n). Needs n >= 2.
double standard_error(const std::vector<double>& scores);

double round_half_away(double value, int digits);

struct ScoreCell {
  double mean = 0.0;     // 2 decimals
  double stderr_ = 0.0;  // 4 decimals; 0 when n < 2
  int n = 0;

  bool operator==(const ScoreCell&) const = default;
};

/// model -> category -> mode -> cell.
struct ScoreTable {
  std::map<std::string, std::map<Category, std::map<TechniqueMode, ScoreCell>>> rows;

  bool operator==(const ScoreTable&) const = default;
};

/// Aggregates judgments into per-cell means. Multiple records for the same
/// (question, turn, mode, model) key keep the latest appended one; failed
/// judgments are skipped.
ScoreTable build_score_table(const std::vector<JudgmentRecord>& judgments);

struct ReportOptions {
  std::vector<TechniqueMode> baselines = {TechniqueMode::Standard,
                                          TechniqueMode::CoT};
};

struct ReportBundle {
  std::string text;
  std::string means_csv;
  std::string means_tsv;
  std::string percent_csv;
  std::string percent_tsv;

  /// Writes report.txt, means.csv/.tsv and percent.csv/.tsv into `dir`.
  void write_to(const std::filesystem::path& dir) const;
};

/// Means table, percentage-vs-baseline table with per-column averages, and
/// per-cell standard errors. Deterministic bytes for fixed store contents.
/// Raises EmptyStore when no judgments exist.
ReportBundle render_report(const RunStore& store, const ReportOptions& options = {});

std::string score_table_to_csv(const ScoreTable& table, char delimiter = ',');
ScoreTable score_table_from_csv(const std::string& text, char delimiter = ',');

}  // namespace cqot
