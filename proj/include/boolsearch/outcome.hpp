#pragma once

#include <cstddef>

#include <nlohmann/json_fwd.hpp>

#include "boolsearch/pmid_set.hpp"

namespace boolsearch {

/// Result of one query on one topic: the retrieved set D and its recall/precision.
struct RetrievalOutcome {
  PmidSet retrieved;
  std::size_t n_retrieved = 0;  ///< |D|
  std::size_t relevant_retrieved = 0;  ///< |D ∩ gold|
  double recall = 0.0;
  double precision = 0.0;

  /// Outcome of a topic that produced no executable query.
  static RetrievalOutcome none() { return {}; }
};

/// Throws ContractError when `gold` is empty.
RetrievalOutcome score(const PmidSet& retrieved, const PmidSet& gold);

/// Scoring from counts only (live searches truncated to a count, tests).
RetrievalOutcome score_counts(std::size_t n_retrieved, std::size_t relevant_retrieved,
                              std::size_t n_gold);

void to_json(nlohmann::json& j, const RetrievalOutcome& outcome);

}  // namespace boolsearch
