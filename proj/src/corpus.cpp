#include "boolsearch/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "boolsearch/errors.hpp"

namespace boolsearch {

void Corpus::add(Document doc) {
  if (doc.pmid == 0) throw DataError("document pmid must be positive");
  if (!std::includes(doc.mesh_headings.begin(), doc.mesh_headings.end(), doc.major_mesh.begin(),
                     doc.major_mesh.end())) {
    throw DataError("document " + std::to_string(doc.pmid) +
                    ": major MeSH headings must also appear in mesh");
  }
  const Pmid key = doc.pmid;
  if (!documents_.emplace(key, std::move(doc)).second) {
    throw DataError("duplicate pmid " + std::to_string(key));
  }
}

const Document* Corpus::find(Pmid pmid) const {
  const auto it = documents_.find(pmid);
  return it == documents_.end() ? nullptr : &it->second;
}

PmidSet Corpus::pmids() const {
  std::vector<Pmid> ids;
  ids.reserve(documents_.size());
  for (const auto& [pmid, doc] : documents_) ids.push_back(pmid);
  return PmidSet::from_sorted(std::move(ids));
}

void to_json(nlohmann::json& j, const Document& doc) {
  j = nlohmann::json{{"pmid", doc.pmid},
                     {"title", doc.title},
                     {"abstract", doc.abstract},
                     {"mesh", doc.mesh_headings},
                     {"majr", doc.major_mesh},
                     {"nm", doc.supplementary_concepts},
                     {"pt", doc.publication_types},
                     {"la", doc.language},
                     {"date", format_date(doc.publication_date)}};
}

void from_json(const nlohmann::json& j, Document& doc) {
  doc = Document{};
  doc.pmid = j.at("pmid").get<Pmid>();
  doc.title = j.value("title", "");
  doc.abstract = j.value("abstract", "");
  doc.mesh_headings = j.value("mesh", std::set<std::string>{});
  doc.major_mesh = j.value("majr", std::set<std::string>{});
  doc.supplementary_concepts = j.value("nm", std::set<std::string>{});
  doc.publication_types = j.value("pt", std::set<std::string>{});
  doc.language = j.value("la", "");
  doc.publication_date = parse_date(j.at("date").get<std::string>());
}

Corpus read_corpus(std::istream& in) {
  Corpus corpus;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      corpus.add(nlohmann::json::parse(line).get<Document>());
    } catch (const nlohmann::json::exception& e) {
      throw DataError("corpus line " + std::to_string(number) + ": " + e.what(), number);
    } catch (const DataError& e) {
      throw DataError("corpus line " + std::to_string(number) + ": " + e.what(), number);
    }
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file " + path.string());
  return read_corpus(in);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& [pmid, doc] : corpus) out << nlohmann::json(doc).dump() << '\n';
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

std::string corpus_fingerprint(const Corpus& corpus) {
  std::ostringstream out;
  write_corpus(out, corpus);
  return fnv1a_hex(out.str());
}

}  // namespace boolsearch
