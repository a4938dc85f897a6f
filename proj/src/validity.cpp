#include "boolsearch/validity.hpp"

#include <algorithm>
#include <cctype>

#include <nlohmann/json.hpp>

#include "boolsearch/errors.hpp"
#include "boolsearch/text.hpp"

namespace boolsearch {

namespace {

struct Block {
  std::size_t open;         // offset of the opening tag
  std::size_t close_end;    // offset one past the closing tag
  std::string_view inner;
};

// Every well-formed <tag>...</tag> pair, in order. An unclosed opening tag ends the scan.
std::vector<Block> find_blocks(std::string_view text, std::string_view name) {
  const std::string open = "<" + std::string(name) + ">";
  const std::string close = "</" + std::string(name) + ">";
  std::vector<Block> blocks;
  std::size_t pos = 0;
  while ((pos = text.find(open, pos)) != std::string_view::npos) {
    const std::size_t inner_begin = pos + open.size();
    const std::size_t end = text.find(close, inner_begin);
    if (end == std::string_view::npos) break;
    blocks.push_back({pos, end + close.size(), text.substr(inner_begin, end - inner_begin)});
    pos = end + close.size();
  }
  return blocks;
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool has_lowercase_operator(std::string_view query) {
  std::string word;
  auto check = [&word] {
    const std::string lowered = detail::ascii_lower(word);
    const bool is_op = lowered == "and" || lowered == "or" || lowered == "not";
    const bool upper = word == "AND" || word == "OR" || word == "NOT";
    word.clear();
    return is_op && !upper;
  };
  for (char c : query) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '"') {
      if (check()) return true;
    } else {
      word += c;
    }
  }
  return check();
}

}  // namespace

std::string_view to_string(FormatViolation v) noexcept {
  switch (v) {
    case FormatViolation::missing_answer_tags: return "missing_answer_tags";
    case FormatViolation::multiple_answer_blocks: return "multiple_answer_blocks";
    case FormatViolation::content_outside_tags: return "content_outside_tags";
    case FormatViolation::lowercase_operator: return "lowercase_operator";
    case FormatViolation::double_quoted_term: return "double_quoted_term";
    case FormatViolation::empty_answer: return "empty_answer";
    case FormatViolation::missing_think_tags: return "missing_think_tags";
  }
  return "?";
}

std::string_view to_string(OutputMode mode) noexcept {
  return mode == OutputMode::reasoning ? "reasoning" : "no_reasoning";
}

bool FormatVerdict::has(FormatViolation v) const {
  return std::find(violations.begin(), violations.end(), v) != violations.end();
}

FormatVerdict check_format(std::string_view raw, OutputMode mode) {
  FormatVerdict verdict;
  auto flag = [&verdict](FormatViolation v) {
    if (!verdict.has(v)) verdict.violations.push_back(v);
  };

  const auto answers = find_blocks(raw, "answer");
  std::vector<Block> consumed(answers.begin(), answers.end());

  if (answers.empty()) {
    flag(FormatViolation::missing_answer_tags);
  } else if (answers.size() > 1) {
    flag(FormatViolation::multiple_answer_blocks);
  } else {
    const std::string_view query = trim(answers.front().inner);
    verdict.extracted_query = std::string(query);
    if (query.empty()) flag(FormatViolation::empty_answer);
    if (has_lowercase_operator(query)) flag(FormatViolation::lowercase_operator);
    if (query.find('"') != std::string_view::npos) flag(FormatViolation::double_quoted_term);
  }

  if (mode == OutputMode::reasoning && !answers.empty()) {
    const auto thinks = find_blocks(raw.substr(0, answers.front().open), "think");
    if (thinks.empty()) {
      flag(FormatViolation::missing_think_tags);
    } else {
      consumed.insert(consumed.begin(), thinks.front());
    }
  }

  // Everything outside the accepted blocks must be whitespace.
  std::size_t cursor = 0;
  bool outside = false;
  for (const Block& b : consumed) {
    outside = outside || !blank(raw.substr(cursor, b.open - cursor));
    cursor = b.close_end;
  }
  if (outside || !blank(raw.substr(cursor))) flag(FormatViolation::content_outside_tags);

  verdict.ok = verdict.violations.empty();
  return verdict;
}

void ExecutionLimits::validate() const {
  if (min_docs == 0) throw ContractError("min_docs must be positive");
  if (min_docs > max_docs) throw ContractError("min_docs must not exceed max_docs");
}

std::string_view to_string(ValidityReason reason) noexcept {
  switch (reason) {
    case ValidityReason::ok: return "ok";
    case ValidityReason::parse_failure: return "parse_failure";
    case ValidityReason::zero_results: return "zero_results";
    case ValidityReason::over_limit: return "over_limit";
  }
  return "?";
}

ValidityVerdict check_validity(const std::string& query, const CountFunction& count,
                               const ExecutionLimits& limits) {
  limits.validate();
  ValidityVerdict verdict;
  ParseResult parsed = parse(query);
  verdict.diagnostics = std::move(parsed.diagnostics);
  if (!parsed.ok()) {
    verdict.reason = ValidityReason::parse_failure;
    return verdict;
  }

  std::size_t n = 0;
  try {
    n = count(query);
  } catch (const QueryRejected& rejected) {
    verdict.reason = rejected.reason() == QueryRejected::Reason::too_broad
                         ? ValidityReason::over_limit
                         : ValidityReason::parse_failure;
    return verdict;
  }
  verdict.n_retrieved = n;
  if (n < limits.min_docs) {
    verdict.reason = ValidityReason::zero_results;
  } else if (n > limits.max_docs) {
    verdict.reason = ValidityReason::over_limit;
  } else {
    verdict.reason = ValidityReason::ok;
    verdict.ok = true;
  }
  return verdict;
}

void to_json(nlohmann::json& j, const FormatVerdict& v) {
  j = nlohmann::json{{"ok", v.ok}};
  j["extracted_query"] = v.extracted_query ? nlohmann::json(*v.extracted_query) : nlohmann::json();
  auto& list = j["violations"] = nlohmann::json::array();
  for (auto violation : v.violations) list.push_back(std::string(to_string(violation)));
}

void to_json(nlohmann::json& j, const ValidityVerdict& v) {
  j = nlohmann::json{{"ok", v.ok}, {"reason", std::string(to_string(v.reason))}};
  j["n_retrieved"] = v.n_retrieved ? nlohmann::json(*v.n_retrieved) : nlohmann::json();
  j["diagnostics"] = v.diagnostics;
}

}  // namespace boolsearch
