#include <algorithm>
#include <fstream>
#include <set>

#include "cqot/bench.hpp"
#include "cqot/errors.hpp"
#include "cqot/json_io.hpp"

namespace cqot {

std::vector<BenchQuestion> load_questions(const std::filesystem::path& path,
                                          const std::set<Category>& categories) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorKind::IoError, "cannot open questions file: " + path.string());
  }

  std::vector<BenchQuestion> questions;
  std::set<std::string> seen_ids;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      raise(ErrorKind::SchemaError,
            path.filename().string() + ":" + std::to_string(line_number) +
                ": not a JSON object");
    }
    BenchQuestion question;
    try {
      question = bench_question_from_json(j);
    } catch (const CqotError& error) {
      raise(error.kind(), path.filename().string() + ":" +
                              std::to_string(line_number) + ": " + error.what());
    }
    if (!seen_ids.insert(question.id).second) {
      raise(ErrorKind::DuplicateId,
            path.filename().string() + ":" + std::to_string(line_number) +
                ": duplicate question id '" + question.id + "'");
    }
    if (categories.empty() || categories.count(question.category)) {
      questions.push_back(std::move(question));
    }
  }

  std::sort(questions.begin(), questions.end(),
            [](const BenchQuestion& a, const BenchQuestion& b) { return a.id < b.id; });
  return questions;
}

}  // namespace cqot
