#pragma once

// Local Boolean retrieval over a Corpus.
//
// Field semantics (case-insensitive throughout):
//   [ti] title tokens            [ab] abstract tokens      [tiab] title + abstract
//   [mh] whole MeSH heading      [majr] whole major MeSH   [nm] whole supplementary concept
//   [pt] whole publication type  [la] whole language code
//   [tw] title + abstract + MeSH heading tokens
//   [all] and untagged terms: tokens of every field plus whole-value matches on
//         MeSH, concepts, publication types and language
//
// A multiword term matches a contiguous token run inside one field value. A
// wildcard term matches by prefix on its last token (or on the whole value for
// whole-value fields).

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "boolsearch/corpus.hpp"
#include "boolsearch/errors.hpp"
#include "boolsearch/pmid_set.hpp"
#include "boolsearch/query.hpp"
#include "boolsearch/text.hpp"

namespace boolsearch {

struct IndexOptions {
  TokenizerConfig tokenizer;
  /// Dictionary entries one wildcard term may expand to before execution is refused.
  std::size_t max_wildcard_expansions = 10000;
};

class WildcardExpansionError : public QueryRejected {
 public:
  WildcardExpansionError(const std::string& stem, std::size_t limit)
      : QueryRejected(Reason::too_broad, "wildcard '" + stem + "*' expands to more than " +
                                             std::to_string(limit) + " dictionary entries") {}
};

class PostingsIndex {
 public:
  enum class TextField : std::uint8_t { title, abstract, mesh, nm, pt, la };
  enum class ValueField : std::uint8_t { mesh, majr, nm, pt, la };

  static constexpr std::size_t kTextFields = 6;
  static constexpr std::size_t kValueFields = 5;

  /// One token position: which document, which value of a multi-valued field, which token.
  struct Occurrence {
    Pmid pmid;
    std::uint32_t instance;
    std::uint32_t position;

    auto operator<=>(const Occurrence&) const = default;
  };

  using TextPostings = std::map<std::string, std::vector<Occurrence>, std::less<>>;
  using ValuePostings = std::map<std::string, PmidSet, std::less<>>;

  const TextPostings& text(TextField field) const { return text_[static_cast<std::size_t>(field)]; }
  const ValuePostings& values(ValueField field) const {
    return values_[static_cast<std::size_t>(field)];
  }
  const IndexOptions& options() const noexcept { return options_; }
  const PmidSet& documents() const noexcept { return documents_; }
  std::optional<Date> publication_date(Pmid pmid) const;

  friend PostingsIndex build_index(const Corpus& corpus, const IndexOptions& options);
  friend void save_snapshot(const PostingsIndex& index, std::ostream& out);
  friend PostingsIndex load_snapshot(std::istream& in);

 private:
  IndexOptions options_;
  PmidSet documents_;
  std::map<Pmid, Date> dates_;
  std::array<TextPostings, kTextFields> text_;
  std::array<ValuePostings, kValueFields> values_;
};

PostingsIndex build_index(const Corpus& corpus, const IndexOptions& options = {});

/// Evaluates the query against the index. Throws WildcardExpansionError past the cap.
PmidSet execute(const PostingsIndex& index, const QueryAst& ast);
PmidSet execute(const PostingsIndex& index, const Node& node);

/// Per-document predicate evaluation with no index; the reference for `execute`.
PmidSet brute_force_execute(const Corpus& corpus, const QueryAst& ast,
                            const TokenizerConfig& tokenizer = {});

/// Binary (CBOR) snapshot of a built index.
void save_snapshot(const PostingsIndex& index, std::ostream& out);
PostingsIndex load_snapshot(std::istream& in);

}  // namespace boolsearch
