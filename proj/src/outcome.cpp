#include "boolsearch/outcome.hpp"

#include <nlohmann/json.hpp>

#include "boolsearch/errors.hpp"

namespace boolsearch {

RetrievalOutcome score_counts(std::size_t n_retrieved, std::size_t relevant_retrieved,
                              std::size_t n_gold) {
  if (n_gold == 0) throw ContractError("gold set must not be empty");
  if (relevant_retrieved > n_retrieved || relevant_retrieved > n_gold) {
    throw ContractError("relevant retrieved count exceeds |D| or |gold|");
  }
  RetrievalOutcome out;
  out.n_retrieved = n_retrieved;
  out.relevant_retrieved = relevant_retrieved;
  out.recall = static_cast<double>(relevant_retrieved) / static_cast<double>(n_gold);
  out.precision = n_retrieved == 0
                      ? 0.0
                      : static_cast<double>(relevant_retrieved) / static_cast<double>(n_retrieved);
  return out;
}

RetrievalOutcome score(const PmidSet& retrieved, const PmidSet& gold) {
  RetrievalOutcome out = score_counts(retrieved.size(), intersection_size(retrieved, gold),
                                      gold.size());
  out.retrieved = retrieved;
  return out;
}

void to_json(nlohmann::json& j, const RetrievalOutcome& o) {
  j = nlohmann::json{{"n_retrieved", o.n_retrieved},
                     {"relevant_retrieved", o.relevant_retrieved},
                     {"recall", o.recall},
                     {"precision", o.precision}};
}

}  // namespace boolsearch
