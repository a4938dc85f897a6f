#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "boolsearch/dataset.hpp"
#include "boolsearch/entrez.hpp"
#include "boolsearch/executor.hpp"
#include "boolsearch/generator.hpp"
#include "boolsearch/metrics.hpp"
#include "boolsearch/reward.hpp"
#include "boolsearch/validity.hpp"

namespace boolsearch {

struct RunConfig {
  int max_attempts = 10;
  PromptKind prompt_kind = PromptKind::no_reasoning;
  RewardConfig reward;  ///< reward.limits bounds valid result counts
  std::size_t parallelism = 1;
  std::uint64_t seed = 0;
  bool date_bounded = false;  ///< restrict each topic to documents dated on or before it
  int generator_retries = 3;
  std::chrono::milliseconds generator_backoff{1000};
  std::chrono::seconds topic_timeout{120};  ///< remote executors only
  SummaryOptions summary;

  /// Throws ContractError on max_attempts < 1, parallelism < 1, negative retries or an
  /// invalid reward config.
  void validate() const;
};

/// Infrastructure failure (executor transport error or timeout) that ends a topic without
/// scoring it.
class TopicAborted : public std::runtime_error {
 public:
  TopicAborted(std::string topic_id, const std::string& message)
      : std::runtime_error(message), topic_id_(std::move(topic_id)) {}
  const std::string& topic_id() const noexcept { return topic_id_; }

 private:
  std::string topic_id_;
};

/// Regenerates until a query passes the format and validity gates or attempts run out.
/// Throws TopicAborted on executor infrastructure failure.
TopicEval run_topic(const Topic& topic, Generator& generator, Executor& executor,
                    const RunConfig& cfg, Clock& clock);
TopicEval run_topic(const Topic& topic, Generator& generator, Executor& executor,
                    const RunConfig& cfg);

struct AbortedTopic {
  std::string topic_id;
  std::string error;
};

struct EvalReport {
  std::vector<TopicEval> rows;  ///< completed topics, sorted by topic_id
  std::vector<AbortedTopic> aborted;  ///< sorted by topic_id
  std::optional<EvalSummary> summary;  ///< absent when every topic aborted
  std::string config_hash;
  std::string corpus;
  std::string generator;
  std::uint64_t seed = 0;
};

/// Runs every topic, up to cfg.parallelism at a time, and aggregates. Generator and
/// executor must be safe to call concurrently when parallelism > 1.
EvalReport run_eval(const std::vector<Topic>& topics, Generator& generator, Executor& executor,
                    const RunConfig& cfg, Clock& clock);
EvalReport run_eval(const std::vector<Topic>& topics, Generator& generator, Executor& executor,
                    const RunConfig& cfg);

/// Canonical JSON of the result-affecting parts of a run config.
nlohmann::json config_json(const RunConfig& cfg);

void to_json(nlohmann::json& j, const EvalReport& report);
/// Deterministic, pretty-printed report text.
std::string report_text(const EvalReport& report);

struct ScoredOutput {
  FormatVerdict format;
  ValidityVerdict validity;
  std::optional<RetrievalOutcome> outcome;
  RewardBreakdown reward;
};

/// Format gate, validity gate, execution and reward for one raw output.
/// TransportError propagates.
ScoredOutput score_output(const Topic& topic, const std::string& raw_output, Executor& executor,
                          const RunConfig& cfg);

struct BatchResult {
  std::vector<ScoredOutput> outputs;
  std::vector<double> advantages;
};

/// Scores a group of G >= 2 outputs for one topic and normalizes within the group.
/// Any TransportError fails the whole batch.
BatchResult reward_batch(const Topic& topic, const std::vector<std::string>& raw_outputs,
                         Executor& executor, const RunConfig& cfg);

void to_json(nlohmann::json& j, const ScoredOutput& scored);

}  // namespace boolsearch
