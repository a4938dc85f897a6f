#include "boolsearch/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "boolsearch/errors.hpp"

namespace boolsearch {

double f_beta(double recall, double precision, double beta) {
  if (beta <= 0.0) throw ContractError("beta must be positive");
  const double b2 = beta * beta;
  const double denominator = b2 * recall + precision;
  if (denominator == 0.0) return 0.0;
  return (1.0 + b2) * recall * precision / denominator;
}

EvalSummary summarize(std::span<const TopicEval> evals, const SummaryOptions& options) {
  if (evals.empty()) throw ContractError("cannot summarize an empty evaluation");
  EvalSummary s;
  s.options = options;
  s.topics = evals.size();

  double recall = 0, f3 = 0, precision = 0, retrieved = 0;
  std::size_t above80 = 0, above90 = 0, successes = 0;
  double regenerations = 0;
  for (const TopicEval& e : evals) {
    regenerations += e.regenerations;
    if (e.success) ++successes;
    if (!e.success && !options.include_failed) continue;
    ++s.scored_topics;
    const double r = e.success ? e.outcome.recall : 0.0;
    recall += r;
    f3 += e.success ? e.f3 : 0.0;
    precision += e.success ? e.outcome.precision : 0.0;
    retrieved += e.success ? static_cast<double>(e.outcome.n_retrieved) : 0.0;
    if (options.strict_thresholds ? r > 0.80 : r >= 0.80) ++above80;
    if (options.strict_thresholds ? r > 0.90 : r >= 0.90) ++above90;
  }

  const auto n_all = static_cast<double>(evals.size());
  s.mean_regenerations = regenerations / n_all;
  s.pct_success = 100.0 * static_cast<double>(successes) / n_all;
  if (s.scored_topics > 0) {
    const auto n = static_cast<double>(s.scored_topics);
    s.mean_recall = recall / n;
    s.mean_f3 = f3 / n;
    s.mean_precision = precision / n;
    s.mean_retrieved = retrieved / n;
    s.pct_recall_gt_80 = 100.0 * static_cast<double>(above80) / n;
    s.pct_recall_gt_90 = 100.0 * static_cast<double>(above90) / n;
  }
  return s;
}

void to_json(nlohmann::json& j, const TopicEval& e) {
  j = nlohmann::json{{"topic_id", e.topic_id},
                     {"outcome", e.outcome},
                     {"f3", e.f3},
                     {"regenerations", e.regenerations},
                     {"success", e.success},
                     {"truncated", e.truncated},
                     {"attempt_failures", e.attempt_failures}};
  j["query"] = e.query ? nlohmann::json(*e.query) : nlohmann::json();
}

void to_json(nlohmann::json& j, const EvalSummary& s) {
  j = nlohmann::json{{"mean_recall", s.mean_recall},
                     {"mean_f3", s.mean_f3},
                     {"pct_recall_gt_80", s.pct_recall_gt_80},
                     {"pct_recall_gt_90", s.pct_recall_gt_90},
                     {"mean_precision", s.mean_precision},
                     {"mean_retrieved", s.mean_retrieved},
                     {"mean_regenerations", s.mean_regenerations},
                     {"pct_success", s.pct_success},
                     {"topics", s.topics},
                     {"scored_topics", s.scored_topics},
                     {"strict_thresholds", s.options.strict_thresholds},
                     {"include_failed", s.options.include_failed}};
}

std::string format_summary_table(const EvalSummary& s, const std::string& label) {
  const std::string gt = s.options.strict_thresholds ? ">" : ">=";
  const std::vector<std::string> columns{"Recall",    "F3",           "Recall" + gt + "80%",
                                         "Recall" + gt + "90%", "Precision", "Avg Retrieved",
                                         "Avg Regen", "%Success"};
  const std::vector<std::pair<double, int>> values{
      {s.mean_recall, 4},      {s.mean_f3, 4},        {s.pct_recall_gt_80, 2},
      {s.pct_recall_gt_90, 2}, {s.mean_precision, 4}, {s.mean_retrieved, 2},
      {s.mean_regenerations, 2}, {s.pct_success, 2}};

  std::vector<std::string> cells;
  for (const auto& [value, digits] : values) {
    std::ostringstream cell;
    cell << std::fixed << std::setprecision(digits) << value;
    cells.push_back(cell.str());
  }

  const int label_width = static_cast<int>(std::max<std::size_t>(label.size(), 8));
  std::ostringstream header, row;
  header << std::left << std::setw(label_width) << "Run" << std::right;
  row << std::left << std::setw(label_width) << label << std::right;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const int width = static_cast<int>(std::max(columns[i].size(), cells[i].size()));
    header << "  " << std::setw(width) << columns[i];
    row << "  " << std::setw(width) << cells[i];
  }
  std::ostringstream out;
  out << header.str() << '\n' << row.str();
  out << '\n'
      << "(" << s.topics << " topics; "
      << (s.options.include_failed ? "failed topics scored as zero"
                                   : "failed topics excluded from retrieval means")
      << ")\n";
  return out.str();
}

}  // namespace boolsearch
