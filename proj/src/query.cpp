#include "boolsearch/query.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include <nlohmann/json.hpp>

#include "boolsearch/text.hpp"

namespace boolsearch {

namespace {

constexpr std::array<std::pair<FieldTag, std::string_view>, 10> kTagNames{{
    {FieldTag::ti, "ti"},
    {FieldTag::ab, "ab"},
    {FieldTag::tiab, "tiab"},
    {FieldTag::mh, "mh"},
    {FieldTag::majr, "majr"},
    {FieldTag::nm, "nm"},
    {FieldTag::tw, "tw"},
    {FieldTag::all, "all"},
    {FieldTag::pt, "pt"},
    {FieldTag::la, "la"},
}};

// Date-restriction tags PubMed understands. They are refused with a dedicated diagnostic.
constexpr std::array<std::string_view, 16> kDateTags{
    "dp",    "pdat", "edat", "crdt", "mhda", "dcom", "lr",   "da",
    "epdat", "ppdat", "mdat", "publication date", "date - publication",
    "create date", "entrez date", "date - create"};

bool is_operator_word(std::string_view word) {
  return word == "AND" || word == "OR" || word == "NOT";
}

bool is_delimiter(char c) {
  return c == '(' || c == ')' || c == '[' || c == ']' || c == '"' ||
         std::isspace(static_cast<unsigned char>(c));
}

enum class TokenKind { LParen, RParen, Word, Quoted, Tag, And, Or, Not };

struct Token {
  TokenKind kind;
  std::size_t begin;
  std::size_t end;
  std::string text;
};

struct Abort {};

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& options, std::vector<ParseDiagnostic>& diags)
      : text_(text), options_(options), diags_(diags) {}

  std::optional<QueryAst> run() {
    try {
      lex();
      if (tokens_.empty()) {
        fatal(DiagnosticKind::empty_query, 0, text_.size(), "query is empty");
      }
      Built built = sequence(std::nullopt, 0);
      if (pos_ < tokens_.size()) {
        const Token& t = tokens_[pos_];
        fatal(DiagnosticKind::unbalanced_paren, t.begin, t.end, "unmatched closing parenthesis");
      }
      if (has_error_) return std::nullopt;
      return QueryAst{std::move(built.node)};
    } catch (const Abort&) {
      return std::nullopt;
    }
  }

 private:
  struct Built {
    Node node;
    std::size_t depth;
  };

  void report(DiagnosticKind kind, Severity severity, std::size_t begin, std::size_t end,
              std::string message) {
    end = std::min(end, text_.size());
    begin = std::min(begin, end);
    diags_.push_back({kind, severity, begin, end, std::move(message)});
    if (severity == Severity::error) has_error_ = true;
  }

  void error(DiagnosticKind kind, std::size_t begin, std::size_t end, std::string message) {
    report(kind, Severity::error, begin, end, std::move(message));
  }

  [[noreturn]] void fatal(DiagnosticKind kind, std::size_t begin, std::size_t end,
                          std::string message) {
    error(kind, begin, end, std::move(message));
    throw Abort{};
  }

  void lex() {
    std::size_t i = 0;
    while (i < text_.size()) {
      const char c = text_[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (c == '(') {
        tokens_.push_back({TokenKind::LParen, i, i + 1, "("});
        ++i;
      } else if (c == ')') {
        tokens_.push_back({TokenKind::RParen, i, i + 1, ")"});
        ++i;
      } else if (c == '[') {
        const auto close = text_.find(']', i + 1);
        if (close == std::string_view::npos) {
          fatal(DiagnosticKind::bad_field_tag, i, text_.size(), "field tag is missing ']'");
        }
        tokens_.push_back(
            {TokenKind::Tag, i, close + 1, std::string(text_.substr(i + 1, close - i - 1))});
        i = close + 1;
      } else if (c == ']') {
        fatal(DiagnosticKind::bad_field_tag, i, i + 1, "']' without an opening '['");
      } else if (c == '"') {
        const auto close = text_.find('"', i + 1);
        if (close == std::string_view::npos) {
          fatal(DiagnosticKind::unterminated_quote, i, text_.size(), "double quote is not closed");
        }
        tokens_.push_back(
            {TokenKind::Quoted, i, close + 1, std::string(text_.substr(i + 1, close - i - 1))});
        i = close + 1;
      } else {
        const std::size_t begin = i;
        while (i < text_.size() && !is_delimiter(text_[i])) ++i;
        std::string word(text_.substr(begin, i - begin));
        TokenKind kind = TokenKind::Word;
        if (word == "AND") kind = TokenKind::And;
        if (word == "OR") kind = TokenKind::Or;
        if (word == "NOT") kind = TokenKind::Not;
        tokens_.push_back({kind, begin, i, std::move(word)});
      }
    }
  }

  bool at_end() const { return pos_ >= tokens_.size(); }
  const Token& peek() const { return tokens_[pos_]; }
  bool peek_is(TokenKind kind) const { return !at_end() && peek().kind == kind; }
  static bool is_operator(TokenKind kind) {
    return kind == TokenKind::And || kind == TokenKind::Or || kind == TokenKind::Not;
  }

  void check_depth(std::size_t depth, std::size_t begin, std::size_t end) {
    if (depth > options_.max_depth) {
      fatal(DiagnosticKind::nesting_too_deep, begin, end,
            "query nesting exceeds the limit of " + std::to_string(options_.max_depth));
    }
  }

  Built sequence(std::optional<std::size_t> open_paren, std::size_t nesting) {
    Built acc = unit(open_paren, nesting);
    std::optional<Operator> open_op;
    while (!at_end() && peek().kind != TokenKind::RParen) {
      Operator op = Operator::And;
      const Token& next = peek();
      if (is_operator(next.kind)) {
        op = next.kind == TokenKind::And ? Operator::And
             : next.kind == TokenKind::Or ? Operator::Or
                                          : Operator::Not;
        const Token op_token = next;
        ++pos_;
        if (at_end() || peek().kind == TokenKind::RParen || is_operator(peek().kind)) {
          fatal(DiagnosticKind::dangling_operator, op_token.begin, op_token.end,
                "operator " + op_token.text + " has no right operand");
        }
      }
      const std::size_t rhs_begin = peek().begin;
      Built rhs = unit(open_paren, nesting);
      if (op != Operator::Not && open_op == op) {
        std::get<Operation>(acc.node.value).children.push_back(std::move(rhs.node));
        acc.depth = std::max(acc.depth, rhs.depth + 1);
      } else {
        const std::size_t depth = std::max(acc.depth, rhs.depth) + 1;
        std::vector<Node> children;
        children.push_back(std::move(acc.node));
        children.push_back(std::move(rhs.node));
        acc = Built{make_operation(op, std::move(children)), depth};
        open_op = op == Operator::Not ? std::nullopt : std::optional<Operator>(op);
      }
      check_depth(acc.depth, rhs_begin, pos_ > 0 ? tokens_[pos_ - 1].end : rhs_begin);
    }
    return acc;
  }

  Built unit(std::optional<std::size_t> open_paren, std::size_t nesting) {
    if (at_end()) {
      if (open_paren) {
        fatal(DiagnosticKind::unbalanced_paren, *open_paren, *open_paren + 1,
              "opening parenthesis is never closed");
      }
      fatal(DiagnosticKind::empty_query, 0, text_.size(), "query is empty");
    }
    const Token t = peek();
    switch (t.kind) {
      case TokenKind::LParen: {
        check_depth(nesting + 1, t.begin, t.end);
        ++pos_;
        if (peek_is(TokenKind::RParen)) {
          fatal(DiagnosticKind::empty_query, t.begin, peek().end, "empty parentheses");
        }
        Built inner = sequence(t.begin, nesting + 1);
        if (!peek_is(TokenKind::RParen)) {
          fatal(DiagnosticKind::unbalanced_paren, t.begin, t.end,
                "opening parenthesis is never closed");
        }
        ++pos_;
        while (peek_is(TokenKind::Tag)) {
          error(DiagnosticKind::bad_field_tag, peek().begin, peek().end,
                "field tag must follow a term, not a parenthesized group");
          ++pos_;
        }
        return inner;
      }
      case TokenKind::RParen:
        fatal(DiagnosticKind::unbalanced_paren, t.begin, t.end, "unmatched closing parenthesis");
      case TokenKind::And:
      case TokenKind::Or:
      case TokenKind::Not:
        fatal(DiagnosticKind::dangling_operator, t.begin, t.end,
              "operator " + t.text + " has no left operand");
      case TokenKind::Tag:
        fatal(DiagnosticKind::bad_field_tag, t.begin, t.end, "field tag without a term");
      case TokenKind::Word:
      case TokenKind::Quoted:
        return Built{term(), 1};
    }
    fatal(DiagnosticKind::empty_query, t.begin, t.end, "unexpected token");
  }

  Node term() {
    std::vector<std::string> words;
    std::size_t last_begin = 0;
    std::size_t last_end = 0;

    if (peek().kind == TokenKind::Quoted) {
      const Token t = peek();
      ++pos_;
      report(DiagnosticKind::double_quoted_term, Severity::warning, t.begin, t.end,
             "double-quoted phrase disables automatic term mapping");
      words = quoted_words(t.text);
      if (words.empty()) {
        fatal(DiagnosticKind::empty_query, t.begin, t.end, "empty quoted phrase");
      }
      last_begin = t.begin;
      last_end = t.end;
    } else {
      while (peek_is(TokenKind::Word)) {
        const Token& w = peek();
        words.push_back(w.text);
        last_begin = w.begin;
        last_end = w.end;
        ++pos_;
        if (w.text.back() == '*') break;
      }
    }

    bool wildcard = false;
    std::string& last = words.back();
    if (last.back() == '*') {
      wildcard = true;
      while (!last.empty() && last.back() == '*') last.pop_back();
      if (detail::codepoint_length(last) < kMinWildcardStem) {
        error(DiagnosticKind::short_wildcard, last_begin, last_end,
              "wildcard stem '" + last + "' is shorter than " +
                  std::to_string(kMinWildcardStem) + " characters");
      }
      if (last.empty()) {
        words.pop_back();
        if (words.empty()) words.push_back("_");
      }
    }

    std::optional<FieldTag> tag;
    if (peek_is(TokenKind::Tag)) {
      const Token t = peek();
      ++pos_;
      tag = resolve_tag(t);
      while (peek_is(TokenKind::Tag)) {
        error(DiagnosticKind::bad_field_tag, peek().begin, peek().end,
              "a term takes at most one field tag");
        ++pos_;
      }
    }

    std::string text;
    for (const auto& w : words) {
      if (!text.empty()) text += ' ';
      text += w;
    }
    return make_term(std::move(text), tag, wildcard);
  }

  std::optional<FieldTag> resolve_tag(const Token& t) {
    const std::string name = detail::collapse_whitespace(detail::ascii_lower(t.text));
    if (auto tag = field_tag_from_string(name)) return tag;
    if (std::find(kDateTags.begin(), kDateTags.end(), name) != kDateTags.end()) {
      error(DiagnosticKind::date_limit_present, t.begin, t.end,
            "date limits are not allowed in the query");
    } else {
      error(DiagnosticKind::bad_field_tag, t.begin, t.end, "field tag [" + t.text + "] is not allowed");
    }
    return std::nullopt;
  }

  // Quoted content becomes ordinary words; characters the grammar reserves turn into
  // separators and operator keywords are lowercased (matching is case-insensitive).
  static std::vector<std::string> quoted_words(std::string_view content) {
    std::vector<std::string> words;
    std::string current;
    auto flush = [&] {
      if (current.empty()) return;
      if (is_operator_word(current)) current = detail::ascii_lower(current);
      words.push_back(std::move(current));
      current.clear();
    };
    for (char c : content) {
      if (is_delimiter(c)) {
        flush();
      } else {
        current += c;
      }
    }
    flush();
    for (std::size_t i = 0; i + 1 < words.size(); ++i) {
      while (!words[i].empty() && words[i].back() == '*') words[i].pop_back();
    }
    std::erase_if(words, [](const std::string& w) { return w.empty(); });
    return words;
  }

  std::string_view text_;
  const ParseOptions& options_;
  std::vector<ParseDiagnostic>& diags_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  bool has_error_ = false;
};

void serialize_into(const Node& node, std::string& out) {
  if (node.is_term()) {
    const Term& t = node.term();
    out += t.text;
    if (t.wildcard) out += '*';
    if (t.tag) {
      out += '[';
      out += to_string(*t.tag);
      out += ']';
    }
    return;
  }
  const Operation& op = node.operation();
  out += '(';
  for (std::size_t i = 0; i < op.children.size(); ++i) {
    if (i > 0) {
      out += ' ';
      out += to_string(op.op);
      out += ' ';
    }
    serialize_into(op.children[i], out);
  }
  out += ')';
}

Complexity measure(const Node& node) {
  if (node.is_term()) return {1, 1, 1};
  Complexity total{1, 0, 0};
  std::size_t deepest = 0;
  for (const auto& child : node.operation().children) {
    const Complexity c = measure(child);
    total.node_count += c.node_count;
    total.term_count += c.term_count;
    deepest = std::max(deepest, c.depth);
  }
  total.depth = deepest + 1;
  return total;
}

}  // namespace

std::string_view to_string(FieldTag tag) noexcept {
  for (const auto& [value, name] : kTagNames) {
    if (value == tag) return name;
  }
  return "?";
}

std::optional<FieldTag> field_tag_from_string(std::string_view text) {
  const std::string lowered = detail::ascii_lower(text);
  for (const auto& [value, name] : kTagNames) {
    if (name == lowered) return value;
  }
  return std::nullopt;
}

std::string_view to_string(Operator op) noexcept {
  switch (op) {
    case Operator::And: return "AND";
    case Operator::Or: return "OR";
    case Operator::Not: return "NOT";
  }
  return "?";
}

std::string_view to_string(DiagnosticKind kind) noexcept {
  switch (kind) {
    case DiagnosticKind::unbalanced_paren: return "unbalanced_paren";
    case DiagnosticKind::bad_field_tag: return "bad_field_tag";
    case DiagnosticKind::short_wildcard: return "short_wildcard";
    case DiagnosticKind::double_quoted_term: return "double_quoted_term";
    case DiagnosticKind::empty_query: return "empty_query";
    case DiagnosticKind::dangling_operator: return "dangling_operator";
    case DiagnosticKind::date_limit_present: return "date_limit_present";
    case DiagnosticKind::unterminated_quote: return "unterminated_quote";
    case DiagnosticKind::nesting_too_deep: return "nesting_too_deep";
  }
  return "?";
}

Node make_term(std::string text, std::optional<FieldTag> tag, bool wildcard) {
  return Node{Term{std::move(text), wildcard, tag}};
}

Node make_operation(Operator op, std::vector<Node> children) {
  return Node{Operation{op, std::move(children)}};
}

bool ParseResult::has(DiagnosticKind kind) const {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [kind](const ParseDiagnostic& d) { return d.kind == kind; });
}

ParseResult parse(std::string_view text, const ParseOptions& options) {
  ParseResult result;
  Parser parser(text, options, result.diagnostics);
  result.ast = parser.run();
  return result;
}

std::string serialize(const Node& node) {
  std::string out;
  serialize_into(node, out);
  return out;
}

std::string serialize(const QueryAst& ast) { return serialize(ast.root); }

Complexity complexity(const QueryAst& ast) { return measure(ast.root); }

bool is_valid_term_text(std::string_view text) {
  if (text.empty() || text.front() == ' ' || text.back() == ' ') return false;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto space = text.find(' ', start);
    const auto word = text.substr(start, space == std::string_view::npos ? std::string_view::npos
                                                                         : space - start);
    if (word.empty() || is_operator_word(word) || word.back() == '*') return false;
    for (char c : word) {
      if (is_delimiter(c)) return false;
    }
    if (space == std::string_view::npos) break;
    start = space + 1;
  }
  return true;
}

void to_json(nlohmann::json& j, const Node& node) {
  if (node.is_term()) {
    const Term& t = node.term();
    j = nlohmann::json{{"type", "term"}, {"text", t.text}, {"wildcard", t.wildcard}};
    j["tag"] = t.tag ? nlohmann::json(std::string(to_string(*t.tag))) : nlohmann::json(nullptr);
    return;
  }
  const Operation& op = node.operation();
  j = nlohmann::json{{"type", detail::ascii_lower(to_string(op.op))}};
  auto& children = j["children"] = nlohmann::json::array();
  for (const auto& child : op.children) children.push_back(child);
}

void to_json(nlohmann::json& j, const QueryAst& ast) { to_json(j, ast.root); }

void to_json(nlohmann::json& j, const ParseDiagnostic& d) {
  j = nlohmann::json{{"kind", std::string(to_string(d.kind))},
                     {"severity", d.severity == Severity::error ? "error" : "warning"},
                     {"begin", d.begin},
                     {"end", d.end},
                     {"message", d.message}};
}

}  // namespace boolsearch
