#include <cmath>

#include "cqot/bench.hpp"
#include "cqot/errors.hpp"

namespace cqot {

double round_half_away(double value, int digits) {
  const double scale = std::pow(10.0, digits);
  return std::round(value * scale) / scale;
}

double mean_score(const std::vector<int>& scores) {
  if (scores.empty()) raise(ErrorKind::EmptyInput, "no scores to average");
  double sum = 0.0;
  for (int score : scores) sum += score;
  return round_half_away(sum / static_cast<double>(scores.size()), 2);
}

double mean_score(const std::vector<JudgeVerdict>& verdicts) {
  if (verdicts.empty()) raise(ErrorKind::EmptyInput, "no verdicts to average");
  std::vector<int> scores;
  scores.reserve(verdicts.size());
  for (const auto& verdict : verdicts) scores.push_back(verdict.consensus_score);
  return mean_score(scores);
}

double percent_improvement(double cqot_mean, double base_mean) {
  if (!(base_mean > 0.0)) {
    raise(ErrorKind::NonpositiveBase, "baseline mean must be positive");
  }
  return round_half_away(100.0 * (cqot_mean - base_mean) / base_mean, 2);
}

double column_average(const std::vector<double>& cells) {
  if (cells.empty()) raise(ErrorKind::EmptyInput, "no cells to average");
  double sum = 0.0;
  for (double cell : cells) sum += cell;
  return round_half_away(sum / static_cast<double>(cells.size()), 2);
}

double standard_error(const std::vector<double>& scores) {
  const std::size_t n = scores.size();
  if (n < 2) {
    raise(ErrorKind::InsufficientSamples,
          "standard error needs at least 2 samples");
  }
  double mean = 0.0;
  for (double score : scores) mean += score;
  mean /= static_cast<double>(n);
  double squared = 0.0;
  for (double score : scores) squared += (score - mean) * (score - mean);
  const double sample_sd = std::sqrt(squared / static_cast<double>(n - 1));
  return sample_sd / std::sqrt(static_cast<double>(n));
}

}  // namespace cqot
