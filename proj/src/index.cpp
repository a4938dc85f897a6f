#include "boolsearch/index.hpp"

#include <algorithm>
#include <istream>
#include <iterator>
#include <ostream>

#include <nlohmann/json.hpp>

namespace boolsearch {

namespace {

using TextField = PostingsIndex::TextField;
using ValueField = PostingsIndex::ValueField;
using Occurrence = PostingsIndex::Occurrence;

struct FieldSet {
  std::vector<TextField> text;
  std::vector<ValueField> values;
};

FieldSet fields_for(std::optional<FieldTag> tag) {
  if (!tag) tag = FieldTag::all;
  switch (*tag) {
    case FieldTag::ti: return {{TextField::title}, {}};
    case FieldTag::ab: return {{TextField::abstract}, {}};
    case FieldTag::tiab: return {{TextField::title, TextField::abstract}, {}};
    case FieldTag::mh: return {{}, {ValueField::mesh}};
    case FieldTag::majr: return {{}, {ValueField::majr}};
    case FieldTag::nm: return {{}, {ValueField::nm}};
    case FieldTag::pt: return {{}, {ValueField::pt}};
    case FieldTag::la: return {{}, {ValueField::la}};
    case FieldTag::tw: return {{TextField::title, TextField::abstract, TextField::mesh}, {}};
    case FieldTag::all:
      return {{TextField::title, TextField::abstract, TextField::mesh, TextField::nm,
               TextField::pt, TextField::la},
              {ValueField::mesh, ValueField::nm, ValueField::pt, ValueField::la}};
  }
  return {};
}

class TermMatcher {
 public:
  TermMatcher(const PostingsIndex& index, const Term& term)
      : index_(index), term_(term), tokens_(tokenize(term.text, index.options().tokenizer)) {}

  PmidSet run() {
    const FieldSet fields = fields_for(term_.tag);
    PmidSet result;
    for (TextField f : fields.text) result = set_union(result, match_text(index_.text(f)));
    for (ValueField f : fields.values) result = set_union(result, match_value(index_.values(f)));
    return result;
  }

 private:
  void count_expansion() {
    if (++expansions_ > index_.options().max_wildcard_expansions) {
      throw WildcardExpansionError(term_.text, index_.options().max_wildcard_expansions);
    }
  }

  std::vector<Occurrence> lookup_last(const PostingsIndex::TextPostings& postings) {
    const std::string& last = tokens_.back();
    if (!term_.wildcard) {
      const auto it = postings.find(last);
      return it == postings.end() ? std::vector<Occurrence>{} : it->second;
    }
    std::vector<Occurrence> merged;
    for (auto it = postings.lower_bound(last);
         it != postings.end() && it->first.compare(0, last.size(), last) == 0; ++it) {
      count_expansion();
      merged.insert(merged.end(), it->second.begin(), it->second.end());
    }
    std::sort(merged.begin(), merged.end());
    return merged;
  }

  PmidSet match_text(const PostingsIndex::TextPostings& postings) {
    if (tokens_.empty()) return {};
    std::vector<const std::vector<Occurrence>*> lists;
    for (std::size_t k = 0; k + 1 < tokens_.size(); ++k) {
      const auto it = postings.find(tokens_[k]);
      if (it == postings.end()) return {};
      lists.push_back(&it->second);
    }
    const std::vector<Occurrence> last = lookup_last(postings);
    lists.push_back(&last);

    std::vector<Pmid> hits;
    for (const Occurrence& start : *lists.front()) {
      bool matched = true;
      for (std::size_t k = 1; k < lists.size() && matched; ++k) {
        const Occurrence want{start.pmid, start.instance,
                              start.position + static_cast<std::uint32_t>(k)};
        matched = std::binary_search(lists[k]->begin(), lists[k]->end(), want);
      }
      if (matched) hits.push_back(start.pmid);
    }
    return PmidSet(std::move(hits));
  }

  PmidSet match_value(const PostingsIndex::ValuePostings& postings) {
    const std::string key = normalize_value(term_.text);
    if (!term_.wildcard) {
      const auto it = postings.find(key);
      return it == postings.end() ? PmidSet{} : it->second;
    }
    PmidSet result;
    for (auto it = postings.lower_bound(key);
         it != postings.end() && it->first.compare(0, key.size(), key) == 0; ++it) {
      count_expansion();
      result = set_union(result, it->second);
    }
    return result;
  }

  const PostingsIndex& index_;
  const Term& term_;
  std::vector<std::string> tokens_;
  std::size_t expansions_ = 0;
};

void add_text(PostingsIndex::TextPostings& postings, Pmid pmid, std::uint32_t instance,
              std::string_view text, const TokenizerConfig& config) {
  std::uint32_t position = 0;
  for (auto& token : tokenize(text, config)) {
    postings[std::move(token)].push_back({pmid, instance, position++});
  }
}

void add_value(std::map<std::string, std::vector<Pmid>, std::less<>>& staging, Pmid pmid,
               std::string_view value) {
  const std::string key = normalize_value(value);
  if (!key.empty()) staging[key].push_back(pmid);
}

}  // namespace

std::optional<Date> PostingsIndex::publication_date(Pmid pmid) const {
  const auto it = dates_.find(pmid);
  if (it == dates_.end()) return std::nullopt;
  return it->second;
}

PostingsIndex build_index(const Corpus& corpus, const IndexOptions& options) {
  PostingsIndex index;
  index.options_ = options;
  index.documents_ = corpus.pmids();
  const auto& tok = options.tokenizer;

  std::array<std::map<std::string, std::vector<Pmid>, std::less<>>, PostingsIndex::kValueFields>
      staging;
  auto text = [&](TextField f) -> auto& { return index.text_[static_cast<std::size_t>(f)]; };
  auto stage = [&](ValueField f) -> auto& { return staging[static_cast<std::size_t>(f)]; };

  for (const auto& [pmid, doc] : corpus) {
    index.dates_.emplace(pmid, doc.publication_date);
    add_text(text(TextField::title), pmid, 0, doc.title, tok);
    add_text(text(TextField::abstract), pmid, 0, doc.abstract, tok);
    std::uint32_t instance = 0;
    for (const auto& heading : doc.mesh_headings) {
      add_text(text(TextField::mesh), pmid, instance++, heading, tok);
      add_value(stage(ValueField::mesh), pmid, heading);
    }
    for (const auto& heading : doc.major_mesh) {
      add_value(stage(ValueField::majr), pmid, heading);
    }
    instance = 0;
    for (const auto& concept_name : doc.supplementary_concepts) {
      add_text(text(TextField::nm), pmid, instance++, concept_name, tok);
      add_value(stage(ValueField::nm), pmid, concept_name);
    }
    instance = 0;
    for (const auto& type : doc.publication_types) {
      add_text(text(TextField::pt), pmid, instance++, type, tok);
      add_value(stage(ValueField::pt), pmid, type);
    }
    add_text(text(TextField::la), pmid, 0, doc.language, tok);
    add_value(stage(ValueField::la), pmid, doc.language);
  }

  // Documents are visited in pmid order, so occurrence lists come out sorted and unique.
  for (std::size_t f = 0; f < PostingsIndex::kValueFields; ++f) {
    for (auto& [key, ids] : staging[f]) index.values_[f].emplace(key, PmidSet(std::move(ids)));
  }
  return index;
}

PmidSet execute(const PostingsIndex& index, const Node& node) {
  if (node.is_term()) return TermMatcher(index, node.term()).run();
  const Operation& op = node.operation();
  PmidSet acc = execute(index, op.children.front());
  for (std::size_t i = 1; i < op.children.size(); ++i) {
    if (op.op == Operator::And && acc.empty()) return acc;
    if (op.op == Operator::Not && acc.empty()) return acc;
    const PmidSet rhs = execute(index, op.children[i]);
    switch (op.op) {
      case Operator::And: acc = set_intersection(acc, rhs); break;
      case Operator::Or: acc = set_union(acc, rhs); break;
      case Operator::Not: acc = set_difference(acc, rhs); break;
    }
  }
  return acc;
}

PmidSet execute(const PostingsIndex& index, const QueryAst& ast) { return execute(index, ast.root); }

namespace {

constexpr int kSnapshotVersion = 1;

}  // namespace

void save_snapshot(const PostingsIndex& index, std::ostream& out) {
  nlohmann::json j;
  j["version"] = kSnapshotVersion;
  j["tokenizer"] = {{"lowercase", index.options_.tokenizer.lowercase},
                    {"keep_internal_hyphens", index.options_.tokenizer.keep_internal_hyphens}};
  j["max_wildcard_expansions"] = index.options_.max_wildcard_expansions;
  auto& docs = j["documents"] = nlohmann::json::array();
  for (const auto& [pmid, date] : index.dates_) docs.push_back({pmid, format_date(date)});
  auto& text = j["text"] = nlohmann::json::array();
  for (const auto& postings : index.text_) {
    nlohmann::json field = nlohmann::json::object();
    for (const auto& [token, list] : postings) {
      auto& flat = field[token] = nlohmann::json::array();
      for (const auto& o : list) {
        flat.push_back(o.pmid);
        flat.push_back(o.instance);
        flat.push_back(o.position);
      }
    }
    text.push_back(std::move(field));
  }
  auto& values = j["values"] = nlohmann::json::array();
  for (const auto& postings : index.values_) {
    nlohmann::json field = nlohmann::json::object();
    for (const auto& [key, ids] : postings) field[key] = ids.ids();
    values.push_back(std::move(field));
  }
  const auto bytes = nlohmann::json::to_cbor(j);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

PostingsIndex load_snapshot(std::istream& in) {
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                        std::istreambuf_iterator<char>()};
  PostingsIndex index;
  try {
    const auto j = nlohmann::json::from_cbor(bytes);
    if (j.at("version").get<int>() != kSnapshotVersion) {
      throw DataError("unsupported index snapshot version");
    }
    index.options_.tokenizer.lowercase = j.at("tokenizer").at("lowercase").get<bool>();
    index.options_.tokenizer.keep_internal_hyphens =
        j.at("tokenizer").at("keep_internal_hyphens").get<bool>();
    index.options_.max_wildcard_expansions = j.at("max_wildcard_expansions").get<std::size_t>();
    std::vector<Pmid> ids;
    for (const auto& d : j.at("documents")) {
      const Pmid pmid = d.at(0).get<Pmid>();
      ids.push_back(pmid);
      index.dates_.emplace(pmid, parse_date(d.at(1).get<std::string>()));
    }
    index.documents_ = PmidSet(std::move(ids));
    const auto& text = j.at("text");
    if (text.size() != PostingsIndex::kTextFields) throw DataError("snapshot: bad text field count");
    for (std::size_t f = 0; f < PostingsIndex::kTextFields; ++f) {
      for (const auto& [token, flat] : text[f].items()) {
        auto& list = index.text_[f][token];
        for (std::size_t i = 0; i + 2 < flat.size(); i += 3) {
          list.push_back({flat[i].get<Pmid>(), flat[i + 1].get<std::uint32_t>(),
                          flat[i + 2].get<std::uint32_t>()});
        }
      }
    }
    const auto& values = j.at("values");
    if (values.size() != PostingsIndex::kValueFields) {
      throw DataError("snapshot: bad value field count");
    }
    for (std::size_t f = 0; f < PostingsIndex::kValueFields; ++f) {
      for (const auto& [key, ids_json] : values[f].items()) {
        index.values_[f].emplace(key, PmidSet(ids_json.get<std::vector<Pmid>>()));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed index snapshot: ") + e.what());
  }
  return index;
}

}  // namespace boolsearch
