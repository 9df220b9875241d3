#include <algorithm>
#include <fstream>

#include "cqot/bench.hpp"
#include "cqot/errors.hpp"
#include "cqot/json_io.hpp"

namespace cqot {

namespace {

constexpr int kSchemaVersion = 1;

std::string sanitize(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    out.push_back(keep ? c : '-');
  }
  return out.empty() ? std::string("unnamed") : out;
}

std::vector<std::filesystem::path> sorted_record_files(
    const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir)) return files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

template <typename Record, typename Parser>
std::vector<Record> read_records(const std::filesystem::path& dir, Parser parse) {
  std::vector<Record> records;
  for (const auto& file : sorted_record_files(dir)) {
    std::ifstream in(file);
    if (!in) raise(ErrorKind::IoError, "cannot read " + file.string());
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
      ++line_number;
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded()) {
        raise(ErrorKind::SchemaError, file.filename().string() + ":" +
                                          std::to_string(line_number) +
                                          ": malformed record");
      }
      records.push_back(parse(j));
    }
  }
  return records;
}

}  // namespace

RunStore::RunStore(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_ / "transcripts", ec);
  std::filesystem::create_directories(root_ / "judgments", ec);
  if (ec) raise(ErrorKind::IoError, "cannot create store at " + root_.string());

  const auto manifest_path = root_ / "manifest.json";
  if (!std::filesystem::exists(manifest_path)) {
    std::ofstream manifest(manifest_path);
    manifest << json{{"schema_version", kSchemaVersion},
                     {"layout", "transcripts/ and judgments/ jsonl files per "
                                "(model, mode, category)"}}
                    .dump(2)
             << '\n';
  }

  // Index existing keys so resumed runs skip completed work.
  for (const auto& record : transcripts()) {
    transcript_keys_.insert({record.key(), record.run_id});
  }
  for (const auto& record : judgments()) {
    judgment_keys_.insert({record.key(), record.run_id});
  }
}

std::filesystem::path RunStore::record_path(const char* kind,
                                            const std::string& model,
                                            TechniqueMode mode,
                                            Category category) const {
  const std::string name = sanitize(model) + "__" + to_string(mode) + "__" +
                           to_string(category) + ".jsonl";
  return root_ / kind / name;
}

void RunStore::append_line(const std::filesystem::path& path,
                           const std::string& line) {
  std::ofstream out(path, std::ios::app);
  if (!out) raise(ErrorKind::IoError, "cannot append to " + path.string());
  out << line << '\n';
  out.flush();
  if (!out) raise(ErrorKind::IoError, "write failed for " + path.string());
}

void RunStore::append(const TranscriptRecord& record) {
  std::lock_guard<std::mutex> lock(write_mutex_);
  const auto key = std::make_pair(record.key(), record.run_id);
  if (transcript_keys_.count(key)) {
    raise(ErrorKind::StoreConflict,
          "transcript for (" + record.question_id + ", turn " +
              std::to_string(record.turn_index) + ", " + to_string(record.mode) +
              ", " + record.model + ") already recorded in run '" +
              record.run_id + "'");
  }
  append_line(record_path("transcripts", record.model, record.mode, record.category),
              to_json(record).dump());
  transcript_keys_.insert(key);
}

void RunStore::append(const JudgmentRecord& record) {
  std::lock_guard<std::mutex> lock(write_mutex_);
  const auto key = std::make_pair(record.key(), record.run_id);
  if (judgment_keys_.count(key)) {
    raise(ErrorKind::StoreConflict,
          "judgment for (" + record.question_id + ", turn " +
              std::to_string(record.turn_index) + ", " + to_string(record.mode) +
              ", " + record.model + ") already recorded in run '" +
              record.run_id + "'");
  }
  append_line(record_path("judgments", record.model, record.mode, record.category),
              to_json(record).dump());
  judgment_keys_.insert(key);
}

bool RunStore::has_transcript(const RecordKey& key) const {
  std::lock_guard<std::mutex> lock(write_mutex_);
  auto it = transcript_keys_.lower_bound({key, ""});
  return it != transcript_keys_.end() && it->first == key;
}

bool RunStore::has_judgment(const RecordKey& key) const {
  std::lock_guard<std::mutex> lock(write_mutex_);
  auto it = judgment_keys_.lower_bound({key, ""});
  return it != judgment_keys_.end() && it->first == key;
}

std::vector<TranscriptRecord> RunStore::transcripts() const {
  return read_records<TranscriptRecord>(
      root_ / "transcripts", [](const json& j) { return transcript_record_from_json(j); });
}

std::vector<JudgmentRecord> RunStore::judgments() const {
  return read_records<JudgmentRecord>(
      root_ / "judgments", [](const json& j) { return judgment_record_from_json(j); });
}

std::optional<TranscriptRecord> RunStore::find_transcript(
    const RecordKey& key) const {
  std::optional<TranscriptRecord> found;
  for (auto& record : transcripts()) {
    if (record.key() == key) found = std::move(record);  // keep the latest
  }
  return found;
}

}  // namespace cqot
