// Index-free reference evaluator: every term is re-checked against the raw document text.

#include <string_view>

#include "boolsearch/index.hpp"

namespace boolsearch {

namespace {

struct Haystack {
  std::vector<std::string_view> token_values;
  std::vector<std::string_view> whole_values;
};

Haystack haystack_for(const Document& doc, std::optional<FieldTag> tag) {
  Haystack h;
  auto tokens_of = [&h](const auto& values) {
    for (const auto& v : values) h.token_values.emplace_back(v);
  };
  auto whole_of = [&h](const auto& values) {
    for (const auto& v : values) h.whole_values.emplace_back(v);
  };
  switch (tag.value_or(FieldTag::all)) {
    case FieldTag::ti:
      h.token_values = {doc.title};
      break;
    case FieldTag::ab:
      h.token_values = {doc.abstract};
      break;
    case FieldTag::tiab:
      h.token_values = {doc.title, doc.abstract};
      break;
    case FieldTag::mh:
      whole_of(doc.mesh_headings);
      break;
    case FieldTag::majr:
      whole_of(doc.major_mesh);
      break;
    case FieldTag::nm:
      whole_of(doc.supplementary_concepts);
      break;
    case FieldTag::pt:
      whole_of(doc.publication_types);
      break;
    case FieldTag::la:
      h.whole_values = {doc.language};
      break;
    case FieldTag::tw:
      h.token_values = {doc.title, doc.abstract};
      tokens_of(doc.mesh_headings);
      break;
    case FieldTag::all:
      h.token_values = {doc.title, doc.abstract, doc.language};
      tokens_of(doc.mesh_headings);
      tokens_of(doc.supplementary_concepts);
      tokens_of(doc.publication_types);
      whole_of(doc.mesh_headings);
      whole_of(doc.supplementary_concepts);
      whole_of(doc.publication_types);
      h.whole_values.emplace_back(doc.language);
      break;
  }
  return h;
}

bool phrase_in(const std::vector<std::string>& haystack, const std::vector<std::string>& phrase,
               bool wildcard) {
  if (phrase.empty() || phrase.size() > haystack.size()) return false;
  for (std::size_t start = 0; start + phrase.size() <= haystack.size(); ++start) {
    bool ok = true;
    for (std::size_t k = 0; k < phrase.size() && ok; ++k) {
      const std::string& hay = haystack[start + k];
      const bool last = k + 1 == phrase.size();
      ok = (last && wildcard) ? hay.starts_with(phrase[k]) : hay == phrase[k];
    }
    if (ok) return true;
  }
  return false;
}

bool term_matches(const Document& doc, const Term& term, const TokenizerConfig& tokenizer) {
  const Haystack h = haystack_for(doc, term.tag);
  const auto phrase = tokenize(term.text, tokenizer);
  for (const auto value : h.token_values) {
    if (phrase_in(tokenize(value, tokenizer), phrase, term.wildcard)) return true;
  }
  const std::string key = normalize_value(term.text);
  for (const auto value : h.whole_values) {
    const std::string candidate = normalize_value(value);
    if (candidate.empty()) continue;
    if (term.wildcard ? candidate.starts_with(key) : candidate == key) return true;
  }
  return false;
}

bool matches(const Document& doc, const Node& node, const TokenizerConfig& tokenizer) {
  if (node.is_term()) return term_matches(doc, node.term(), tokenizer);
  const Operation& op = node.operation();
  switch (op.op) {
    case Operator::And:
      for (const auto& child : op.children) {
        if (!matches(doc, child, tokenizer)) return false;
      }
      return true;
    case Operator::Or:
      for (const auto& child : op.children) {
        if (matches(doc, child, tokenizer)) return true;
      }
      return false;
    case Operator::Not: {
      bool result = matches(doc, op.children.front(), tokenizer);
      for (std::size_t i = 1; i < op.children.size(); ++i) {
        result = result && !matches(doc, op.children[i], tokenizer);
      }
      return result;
    }
  }
  return false;
}

}  // namespace

PmidSet brute_force_execute(const Corpus& corpus, const QueryAst& ast,
                            const TokenizerConfig& tokenizer) {
  std::vector<Pmid> hits;
  for (const auto& [pmid, doc] : corpus) {
    if (matches(doc, ast.root, tokenizer)) hits.push_back(pmid);
  }
  return PmidSet::from_sorted(std::move(hits));
}

}  // namespace boolsearch
