#pragma once

// MEDLINE-style Boolean query model: AST, parser, canonical serializer.
//
// Grammar, informally:
//
//   sequence := unit ( [AND|OR|NOT] unit )*
//   unit     := '(' sequence ')' | term
//   term     := (word+ | "quoted words") ['*'] ['[' tag ']']
//
// Operators are case-sensitive uppercase keywords with equal precedence,
// applied strictly left to right. Adjacent units without an operator are
// joined by AND. A run of plain words forms one phrase; a word ending in
// `*` closes the phrase as a wildcard.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace boolsearch {

enum class FieldTag { ti, ab, tiab, mh, majr, nm, tw, all, pt, la };

std::string_view to_string(FieldTag tag) noexcept;
/// Case-insensitive lookup over the ten allowed tags.
std::optional<FieldTag> field_tag_from_string(std::string_view text);

enum class Operator { And, Or, Not };

std::string_view to_string(Operator op) noexcept;

struct Term {
  std::string text;  ///< words joined by single spaces, `*` stripped
  bool wildcard = false;
  std::optional<FieldTag> tag;

  bool operator==(const Term&) const = default;
};

struct Node;

/// AND/OR hold two or more children; NOT holds exactly two (left minus right).
struct Operation {
  Operator op = Operator::And;
  std::vector<Node> children;

  bool operator==(const Operation& other) const;
};

struct Node {
  std::variant<Term, Operation> value;

  bool is_term() const noexcept { return std::holds_alternative<Term>(value); }
  const Term& term() const { return std::get<Term>(value); }
  const Operation& operation() const { return std::get<Operation>(value); }

  bool operator==(const Node&) const = default;
};

inline bool Operation::operator==(const Operation& other) const {
  return op == other.op && children == other.children;
}

struct QueryAst {
  Node root;

  bool operator==(const QueryAst&) const = default;
};

Node make_term(std::string text, std::optional<FieldTag> tag = std::nullopt,
               bool wildcard = false);
Node make_operation(Operator op, std::vector<Node> children);

enum class DiagnosticKind {
  unbalanced_paren,
  bad_field_tag,
  short_wildcard,
  double_quoted_term,
  empty_query,
  dangling_operator,
  date_limit_present,
  unterminated_quote,
  nesting_too_deep,
};

std::string_view to_string(DiagnosticKind kind) noexcept;

enum class Severity { error, warning };

struct ParseDiagnostic {
  DiagnosticKind kind;
  Severity severity = Severity::error;
  std::size_t begin = 0;  ///< byte offset, inclusive
  std::size_t end = 0;    ///< byte offset, exclusive; end <= input size
  std::string message;
};

struct ParseOptions {
  /// Maximum tree depth before parsing stops with nesting_too_deep.
  std::size_t max_depth = 256;
};

struct ParseResult {
  std::optional<QueryAst> ast;  ///< present iff no error-severity diagnostic
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const noexcept { return ast.has_value(); }
  bool has(DiagnosticKind kind) const;
};

/// Minimum number of characters before a trailing `*`.
inline constexpr std::size_t kMinWildcardStem = 4;

ParseResult parse(std::string_view text, const ParseOptions& options = {});

/// Canonical text: every operator node parenthesized, single spaces, lowercase tags.
std::string serialize(const QueryAst& ast);
std::string serialize(const Node& node);

struct Complexity {
  std::size_t node_count = 0;
  std::size_t depth = 0;
  std::size_t term_count = 0;

  bool operator==(const Complexity&) const = default;
};

Complexity complexity(const QueryAst& ast);

/// True when `text` can be the text of a Term: non-empty words separated by single
/// spaces, no brackets, parentheses or quotes, no bare AND/OR/NOT, and no word
/// ending in `*`.
bool is_valid_term_text(std::string_view text);

void to_json(nlohmann::json& j, const Node& node);
void to_json(nlohmann::json& j, const QueryAst& ast);
void to_json(nlohmann::json& j, const ParseDiagnostic& diagnostic);

}  // namespace boolsearch
