#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "boolsearch/date.hpp"
#include "boolsearch/pmid_set.hpp"

namespace boolsearch {

struct Document {
  Pmid pmid = 0;
  std::string title;
  std::string abstract;
  std::set<std::string> mesh_headings;
  std::set<std::string> major_mesh;  ///< subset of mesh_headings
  std::set<std::string> supplementary_concepts;
  std::set<std::string> publication_types;
  std::string language;
  Date publication_date{};

  bool operator==(const Document&) const = default;
};

/// Documents keyed by PMID. Insertion enforces the document invariants.
class Corpus {
 public:
  using const_iterator = std::map<Pmid, Document>::const_iterator;

  /// Throws DataError on pmid 0, a duplicate pmid, or major_mesh not within mesh_headings.
  void add(Document doc);

  const Document* find(Pmid pmid) const;
  std::size_t size() const noexcept { return documents_.size(); }
  bool empty() const noexcept { return documents_.empty(); }
  const_iterator begin() const noexcept { return documents_.begin(); }
  const_iterator end() const noexcept { return documents_.end(); }

  PmidSet pmids() const;

 private:
  std::map<Pmid, Document> documents_;
};

// JSON-lines: {"pmid", "title", "abstract", "mesh", "majr", "nm", "pt", "la", "date"}.
void to_json(nlohmann::json& j, const Document& doc);
void from_json(const nlohmann::json& j, Document& doc);

/// Throws DataError naming the 1-based line on malformed input.
Corpus read_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, const Corpus& corpus);

/// FNV-1a over the canonical JSON-lines form; stable across runs and platforms.
std::string corpus_fingerprint(const Corpus& corpus);

std::string fnv1a_hex(std::string_view bytes);

}  // namespace boolsearch
