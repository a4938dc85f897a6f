#include "boolsearch/executor.hpp"

#include "boolsearch/errors.hpp"
#include "boolsearch/query.hpp"

namespace boolsearch {

namespace {

PmidSet run_local(const PostingsIndex& index, const std::string& query, const SearchScope& scope) {
  ParseResult parsed = parse(query);
  if (!parsed.ok()) {
    throw QueryRejected(QueryRejected::Reason::unparseable, "query does not parse");
  }
  PmidSet hits = execute(index, *parsed.ast);
  if (!scope.max_date) return hits;
  std::vector<Pmid> kept;
  for (Pmid id : hits) {
    const auto date = index.publication_date(id);
    if (date && *date <= *scope.max_date) kept.push_back(id);
  }
  return PmidSet::from_sorted(std::move(kept));
}

}  // namespace

std::size_t LocalExecutor::count(const std::string& query, const SearchScope& scope) {
  return run_local(index_, query, scope).size();
}

Retrieval LocalExecutor::retrieve(const std::string& query, const SearchScope& scope) {
  Retrieval r;
  r.ids = run_local(index_, query, scope);
  r.count = r.ids.size();
  return r;
}

std::size_t EntrezExecutor::count(const std::string& query, const SearchScope& scope) {
  return client_.esearch_count(query, scope.max_date);
}

Retrieval EntrezExecutor::retrieve(const std::string& query, const SearchScope& scope) {
  IdResult ids = client_.esearch_ids(query, scope.max_date);
  Retrieval r;
  r.ids = PmidSet(std::move(ids.ids));
  r.count = ids.count;
  r.truncated = ids.truncated;
  return r;
}

std::string EntrezExecutor::identity() const { return "entrez:" + client_.config().base_url; }

}  // namespace boolsearch
