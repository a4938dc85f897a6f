#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "boolsearch/outcome.hpp"

namespace boolsearch {

/// (1+β²)·r·p / (β²·r + p), with 0 when r = p = 0.
double f_beta(double recall, double precision, double beta);

struct TopicEval {
  std::string topic_id;
  std::optional<std::string> query;  ///< the accepted query, when one was produced
  RetrievalOutcome outcome;
  double f3 = 0.0;
  int regenerations = 0;  ///< attempts used, 1-based
  bool success = false;
  bool truncated = false;  ///< the executor capped the retrieved id list
  std::vector<std::string> attempt_failures;  ///< one reason per failed attempt
};

struct SummaryOptions {
  /// Recall thresholds compare with `>` when true, `>=` otherwise.
  bool strict_thresholds = true;
  /// Failed topics count as r = p = F3 = 0 and zero documents when true; dropped otherwise.
  bool include_failed = true;
};

struct EvalSummary {
  double mean_recall = 0.0;
  double mean_f3 = 0.0;
  double pct_recall_gt_80 = 0.0;
  double pct_recall_gt_90 = 0.0;
  double mean_precision = 0.0;
  double mean_retrieved = 0.0;
  double mean_regenerations = 0.0;
  double pct_success = 0.0;
  std::size_t topics = 0;         ///< all topics given
  std::size_t scored_topics = 0;  ///< topics entering the retrieval means
  SummaryOptions options;
};

/// Macro averages over topics. Throws ContractError on an empty list.
EvalSummary summarize(std::span<const TopicEval> evals, const SummaryOptions& options = {});

void to_json(nlohmann::json& j, const TopicEval& eval);
void to_json(nlohmann::json& j, const EvalSummary& summary);

/// Aligned text table: Recall, F3, Recall>80%, Recall>90%, Precision, Avg Retrieved,
/// Avg Regen, %Success.
std::string format_summary_table(const EvalSummary& summary, const std::string& label);

}  // namespace boolsearch
