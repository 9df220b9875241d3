#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "cqot/bench.hpp"
#include "cqot/errors.hpp"

namespace cqot {

namespace {

const std::vector<TechniqueMode>& mode_order() {
  static const std::vector<TechniqueMode> order = {
      TechniqueMode::Standard, TechniqueMode::CoT, TechniqueMode::Step1_4,
      TechniqueMode::CQoT};
  return order;
}

const std::vector<Category>& category_order() {
  static const std::vector<Category> order = {
      Category::Reasoning, Category::Math,       Category::Writing,
      Category::Roleplay,  Category::Coding,     Category::Extraction,
      Category::Stem,      Category::Humanities};
  return order;
}

std::string fixed(double value, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", digits, value);
  return buffer;
}

std::string signed_percent(double value) {
  return (value >= 0.0 ? "+" : "") + fixed(value, 2) + "%";
}

std::string csv_field(const std::string& value, char delimiter) {
  if (value.find(delimiter) == std::string::npos &&
      value.find('"') == std::string::npos &&
      value.find('\n') == std::string::npos) {
    return value;
  }
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += "\"\"";
    else quoted.push_back(c);
  }
  quoted += '"';
  return quoted;
}

std::vector<std::string> split_csv_line(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

std::string pad(const std::string& value, std::size_t width) {
  return value.size() >= width ? value : value + std::string(width - value.size(), ' ');
}

struct PercentColumn {
  Category category;
  TechniqueMode baseline;
  std::map<std::string, double> cells;  // model -> percent
  double average = 0.0;
};

}  // namespace

ScoreTable build_score_table(const std::vector<JudgmentRecord>& judgments) {
  // Latest record wins per key, so manual re-judgments supersede older runs.
  std::map<RecordKey, const JudgmentRecord*> latest;
  for (const auto& record : judgments) latest[record.key()] = &record;

  std::map<std::string, std::map<Category, std::map<TechniqueMode, std::vector<double>>>>
      grouped;
  for (const auto& [key, record] : latest) {
    if (record->failed) continue;
    grouped[record->model][record->category][record->mode].push_back(
        static_cast<double>(record->verdict.consensus_score));
  }

  ScoreTable table;
  for (const auto& [model, categories] : grouped) {
    for (const auto& [category, modes] : categories) {
      for (const auto& [mode, scores] : modes) {
        ScoreCell cell;
        double sum = 0.0;
        for (double score : scores) sum += score;
        cell.mean = round_half_away(sum / static_cast<double>(scores.size()), 2);
        cell.n = static_cast<int>(scores.size());
        cell.stderr_ =
            scores.size() >= 2 ? round_half_away(standard_error(scores), 4) : 0.0;
        table.rows[model][category][mode] = cell;
      }
    }
  }
  return table;
}

std::string score_table_to_csv(const ScoreTable& table, char delimiter) {
  std::ostringstream out;
  const char d = delimiter;
  out << "model" << d << "category" << d << "mode" << d << "mean" << d
      << "stderr" << d << "n\n";
  for (const auto& [model, categories] : table.rows) {
    for (Category category : category_order()) {
      auto cat_it = categories.find(category);
      if (cat_it == categories.end()) continue;
      for (TechniqueMode mode : mode_order()) {
        auto mode_it = cat_it->second.find(mode);
        if (mode_it == cat_it->second.end()) continue;
        const ScoreCell& cell = mode_it->second;
        out << csv_field(model, d) << d << to_string(category) << d
            << to_string(mode) << d << fixed(cell.mean, 2) << d
            << fixed(cell.stderr_, 4) << d << cell.n << '\n';
      }
    }
  }
  return out.str();
}

ScoreTable score_table_from_csv(const std::string& text, char delimiter) {
  ScoreTable table;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto fields = split_csv_line(line, delimiter);
    if (fields.size() != 6) {
      raise(ErrorKind::SchemaError,
            "score table line " + std::to_string(line_number) + ": expected 6 fields");
    }
    try {
      ScoreCell cell;
      cell.mean = std::stod(fields[3]);
      cell.stderr_ = std::stod(fields[4]);
      cell.n = std::stoi(fields[5]);
      table.rows[fields[0]][category_from_string(fields[1])]
                [mode_from_string(fields[2])] = cell;
    } catch (const CqotError&) {
      throw;
    } catch (const std::exception&) {
      raise(ErrorKind::SchemaError,
            "score table line " + std::to_string(line_number) + ": bad numeric field");
    }
  }
  return table;
}

void ReportBundle::write_to(const std::filesystem::path& dir) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) raise(ErrorKind::IoError, "cannot create report dir " + dir.string());
  const auto write = [&](const char* name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) raise(ErrorKind::IoError, std::string("cannot write ") + name);
    out << content;
  };
  write("report.txt", text);
  write("means.csv", means_csv);
  write("means.tsv", means_tsv);
  write("percent.csv", percent_csv);
  write("percent.tsv", percent_tsv);
}

ReportBundle render_report(const RunStore& store, const ReportOptions& options) {
  const auto judgments = store.judgments();
  if (judgments.empty()) {
    raise(ErrorKind::EmptyStore, "store at " + store.root().string() +
                                     " holds no judgments to report");
  }
  const ScoreTable table = build_score_table(judgments);
  if (table.rows.empty()) {
    raise(ErrorKind::EmptyStore, "store holds only failed judgments");
  }

  // Which modes and categories actually occur.
  std::set<TechniqueMode> modes_present;
  std::set<Category> categories_present;
  for (const auto& [model, categories] : table.rows) {
    for (const auto& [category, modes] : categories) {
      categories_present.insert(category);
      for (const auto& [mode, cell] : modes) modes_present.insert(mode);
    }
  }

  std::ostringstream text;
  text << "Mean scores (1-10)\n";
  text << "==================\n";
  for (Category category : category_order()) {
    if (!categories_present.count(category)) continue;
    text << '\n' << to_string(category) << '\n';
    std::size_t name_width = 5;
    for (const auto& [model, categories] : table.rows) {
      name_width = std::max(name_width, model.size() + 2);
    }
    text << pad("model", name_width);
    for (TechniqueMode mode : mode_order()) {
      if (modes_present.count(mode)) text << pad(to_string(mode), 22);
    }
    text << '\n';
    for (const auto& [model, categories] : table.rows) {
      auto cat_it = categories.find(category);
      if (cat_it == categories.end()) continue;
      text << pad(model, name_width);
      for (TechniqueMode mode : mode_order()) {
        if (!modes_present.count(mode)) continue;
        auto mode_it = cat_it->second.find(mode);
        if (mode_it == cat_it->second.end()) {
          text << pad("-", 22);
        } else {
          const ScoreCell& cell = mode_it->second;
          text << pad(fixed(cell.mean, 2) + " se=" + fixed(cell.stderr_, 4) +
                          " n=" + std::to_string(cell.n),
                      22);
        }
      }
      text << '\n';
    }
  }

  // Percentage table: cqot against each requested baseline.
  std::vector<PercentColumn> columns;
  const bool have_cqot = modes_present.count(TechniqueMode::CQoT) > 0;
  for (Category category : category_order()) {
    if (!categories_present.count(category)) continue;
    for (TechniqueMode baseline : options.baselines) {
      if (baseline == TechniqueMode::CQoT || !modes_present.count(baseline)) continue;
      if (!have_cqot) continue;
      PercentColumn column{category, baseline, {}, 0.0};
      for (const auto& [model, categories] : table.rows) {
        auto cat_it = categories.find(category);
        if (cat_it == categories.end()) continue;
        auto cqot_it = cat_it->second.find(TechniqueMode::CQoT);
        auto base_it = cat_it->second.find(baseline);
        if (cqot_it == cat_it->second.end() || base_it == cat_it->second.end()) {
          continue;
        }
        column.cells[model] =
            percent_improvement(cqot_it->second.mean, base_it->second.mean);
      }
      if (!column.cells.empty()) columns.push_back(std::move(column));
    }
  }

  std::ostringstream percent_csv;
  std::ostringstream percent_tsv;
  if (columns.empty()) {
    text << "\nPercentage table omitted: needs cqot plus at least one baseline "
            "mode in the store.\n";
    percent_csv << "model,category,baseline,percent\n";
    percent_tsv << "model\tcategory\tbaseline\tpercent\n";
  } else {
    for (auto& column : columns) {
      std::vector<double> cells;
      for (const auto& [model, value] : column.cells) cells.push_back(value);
      column.average = column_average(cells);
    }

    text << "\nImprovement of cqot over baselines (%)\n";
    text << "======================================\n";
    std::set<std::string> models;
    for (const auto& column : columns) {
      for (const auto& [model, value] : column.cells) models.insert(model);
    }
    std::size_t name_width = 9;
    for (const auto& model : models) {
      name_width = std::max(name_width, model.size() + 2);
    }
    text << pad("model", name_width);
    for (const auto& column : columns) {
      text << pad(std::string(to_string(column.category)) + "/" +
                      to_string(column.baseline),
                  22);
    }
    text << '\n';
    for (const auto& model : models) {
      text << pad(model, name_width);
      for (const auto& column : columns) {
        auto it = column.cells.find(model);
        text << pad(it == column.cells.end() ? "-" : signed_percent(it->second), 22);
      }
      text << '\n';
    }
    text << pad("average", name_width);
    for (const auto& column : columns) {
      text << pad(signed_percent(column.average), 22);
    }
    text << '\n';

    // Overall per category: the average of that category's column averages.
    for (Category category : category_order()) {
      std::vector<double> averages;
      for (const auto& column : columns) {
        if (column.category == category) averages.push_back(column.average);
      }
      if (!averages.empty()) {
        text << "overall " << to_string(category) << ": "
             << signed_percent(column_average(averages)) << '\n';
      }
    }

    const auto emit_percent = [&](std::ostringstream& out, char d) {
      out << "model" << d << "category" << d << "baseline" << d << "percent\n";
      for (const auto& column : columns) {
        for (const auto& [model, value] : column.cells) {
          out << csv_field(model, d) << d << to_string(column.category) << d
              << to_string(column.baseline) << d << fixed(value, 2) << '\n';
        }
        out << "average" << d << to_string(column.category) << d
            << to_string(column.baseline) << d << fixed(column.average, 2) << '\n';
      }
      for (Category category : category_order()) {
        std::vector<double> averages;
        for (const auto& column : columns) {
          if (column.category == category) averages.push_back(column.average);
        }
        if (!averages.empty()) {
          out << "overall" << d << to_string(category) << d << "combined" << d
              << fixed(column_average(averages), 2) << '\n';
        }
      }
    };
    emit_percent(percent_csv, ',');
    emit_percent(percent_tsv, '\t');
  }

  ReportBundle bundle;
  bundle.text = text.str();
  bundle.means_csv = score_table_to_csv(table, ',');
  bundle.means_tsv = score_table_to_csv(table, '\t');
  bundle.percent_csv = percent_csv.str();
  bundle.percent_tsv = percent_tsv.str();
  return bundle;
}

}  // namespace cqot
