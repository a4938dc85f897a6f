#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace boolsearch {

struct TokenizerConfig {
  bool lowercase = true;
  /// Keep `-` between two alphanumerics inside one token ("covid-19").
  bool keep_internal_hyphens = true;

  bool operator==(const TokenizerConfig&) const = default;
};

/// Splits on non-alphanumeric bytes. Bytes >= 0x80 count as alphanumeric so UTF-8
/// letters stay inside tokens; only ASCII is case-folded.
std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config = {});

/// Whole-value form used for exact matching of headings, concepts, types and language:
/// ASCII-lowercased, trimmed, inner whitespace runs collapsed to one space.
std::string normalize_value(std::string_view text);

namespace detail {

std::string ascii_lower(std::string_view text);
std::string collapse_whitespace(std::string_view text);
std::size_t codepoint_length(std::string_view text);

}  // namespace detail

}  // namespace boolsearch
