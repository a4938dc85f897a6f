#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "boolsearch/query.hpp"

namespace boolsearch {

enum class OutputMode { no_reasoning, reasoning };

enum class FormatViolation {
  missing_answer_tags,
  multiple_answer_blocks,
  content_outside_tags,
  lowercase_operator,
  double_quoted_term,
  empty_answer,
  missing_think_tags,
};

std::string_view to_string(FormatViolation v) noexcept;
std::string_view to_string(OutputMode mode) noexcept;

struct FormatVerdict {
  bool ok = false;
  std::optional<std::string> extracted_query;  ///< present iff exactly one answer block
  std::vector<FormatViolation> violations;

  bool has(FormatViolation v) const;
};

/// Checks the `<think>`/`<answer>` envelope of a raw model output and the surface
/// conventions of the extracted query (uppercase operators, no double quotes).
FormatVerdict check_format(std::string_view raw_output, OutputMode mode);

struct ExecutionLimits {
  std::size_t max_docs = 200000;
  std::size_t min_docs = 1;

  /// Throws ContractError unless 0 < min_docs <= max_docs.
  void validate() const;
};

enum class ValidityReason { ok, parse_failure, zero_results, over_limit };

std::string_view to_string(ValidityReason reason) noexcept;

struct ValidityVerdict {
  bool ok = false;
  ValidityReason reason = ValidityReason::parse_failure;
  std::optional<std::size_t> n_retrieved;
  std::vector<ParseDiagnostic> diagnostics;
};

/// Maps a query string to its result count. May throw QueryRejected (mapped to a
/// verdict) or TransportError (propagated unchanged).
using CountFunction = std::function<std::size_t(const std::string&)>;

ValidityVerdict check_validity(const std::string& query, const CountFunction& count,
                               const ExecutionLimits& limits);

void to_json(nlohmann::json& j, const FormatVerdict& verdict);
void to_json(nlohmann::json& j, const ValidityVerdict& verdict);

}  // namespace boolsearch
