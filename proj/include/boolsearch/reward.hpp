#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "boolsearch/outcome.hpp"
#include "boolsearch/validity.hpp"

namespace boolsearch {

enum class RewardKind { full, no_log_scaling, no_recall_dependency, no_precision, f3_based };

std::string_view to_string(RewardKind kind) noexcept;
/// Throws ContractError on an unknown name.
RewardKind reward_kind_from_string(std::string_view name);

struct RewardVariant {
  RewardKind kind = RewardKind::full;
  double beta = 3.0;  ///< f3_based only

  void validate() const;
};

struct RewardConfig {
  double M = 10.0;
  double s = 100.0;
  double alpha = 1.0;
  double empty_penalty = -20.0;
  double zero_relevant_penalty = -5.0;
  double format_reward_magnitude = 10.0;
  double validity_reward_magnitude = 10.0;
  /// Retrieval reward for an attempt with no outcome (invalid query). Defaults to empty_penalty.
  std::optional<double> invalid_retrieval_reward;
  ExecutionLimits limits;
  RewardVariant variant;

  double invalid_retrieval() const { return invalid_retrieval_reward.value_or(empty_penalty); }

  /// Throws ContractError unless M > 0, s > 0, alpha >= 0,
  /// empty_penalty <= zero_relevant_penalty <= 0, and limits and variant are valid.
  void validate() const;

  /// Applies one `key = value` setting. Throws ContractError on an unknown key or bad value.
  void set(std::string_view key, std::string_view value);

  /// Flat key/value view with canonical keys, the inverse of set().
  std::map<std::string, std::string> to_map() const;
};

/// Reads `key = value` lines; `#` starts a comment. Throws DataError with the line number.
RewardConfig read_reward_config(std::istream& in, RewardConfig base = {});
RewardConfig load_reward_config(const std::string& path, RewardConfig base = {});
void write_reward_config(std::ostream& out, const RewardConfig& cfg);

struct RewardBreakdown {
  double r_format = 0.0;
  double r_validity = 0.0;
  double r_retrieval = 0.0;
  double r_total = 0.0;
};

/// M · r^α · ln(1 + s·p) / ln(1 + s).
double precision_term(double recall, double precision, const RewardConfig& cfg);

/// M·r + precision_term(r, p).
double recall_weighted_f(double recall, double precision, const RewardConfig& cfg);

/// Penalty cases first (|D| = 0, then r = p = 0), otherwise recall_weighted_f.
double retrieval_reward(const RetrievalOutcome& outcome, const RewardConfig& cfg);

/// Same penalty cases, then the closed form of the named variant.
double variant_reward(const RewardVariant& variant, const RetrievalOutcome& outcome,
                      const RewardConfig& cfg);

/// Format, validity and retrieval components. `outcome` must be present iff validity.ok.
/// The retrieval component uses cfg.variant.
RewardBreakdown total_reward(const FormatVerdict& format, const ValidityVerdict& validity,
                             const std::optional<RetrievalOutcome>& outcome,
                             const RewardConfig& cfg);

/// (reward_i - mean) / population std; all zeros when std < 1e-8. Throws ContractError for G < 2.
std::vector<double> group_advantages(const std::vector<double>& rewards);

void to_json(nlohmann::json& j, const RewardBreakdown& breakdown);
void to_json(nlohmann::json& j, const RewardConfig& cfg);

}  // namespace boolsearch
