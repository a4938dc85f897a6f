#include "boolsearch/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "boolsearch/errors.hpp"
#include "boolsearch/text.hpp"
#include "xml.hpp"

namespace boolsearch {

namespace {

using xml::Element;

// Lowercase, hyphens and underscores to spaces, whitespace collapsed.
std::string fold(std::string_view s) {
  std::string out = detail::ascii_lower(s);
  std::replace_if(out.begin(), out.end(), [](char c) { return c == '-' || c == '_'; }, ' ');
  return detail::collapse_whitespace(out);
}

std::optional<std::uint64_t> parse_positive(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) return std::nullopt;
  return v;
}

const Element* find_first(const Element& root, std::string_view name) {
  const Element* found = nullptr;
  root.walk([&](const Element& e) {
    if (!found && e.name == name) found = &e;
  });
  return found;
}

bool is_systematic_review(const Element& article) {
  if (const auto* type = article.attribute("article-type")) {
    if (fold(*type).find("systematic review") != std::string::npos) return true;
  }
  bool found = false;
  article.walk([&](const Element& e) {
    if (!found && e.name == "subject") {
      found = fold(e.all_text()).find("systematic review") != std::string::npos;
    }
  });
  return found;
}

std::optional<Pmid> article_pmid(const Element& meta) {
  for (const auto& c : meta.children) {
    if (c->name != "article-id") continue;
    const auto* type = c->attribute("pub-id-type");
    if (type && *type == "pmid") return parse_positive(c->all_text());
  }
  return std::nullopt;
}

constexpr std::string_view kMonths[] = {"jan", "feb", "mar", "apr", "may", "jun",
                                        "jul", "aug", "sep", "oct", "nov", "dec"};

unsigned month_value(std::string_view text) {
  if (const auto v = parse_positive(text)) return *v <= 12 ? static_cast<unsigned>(*v) : 0;
  const std::string lowered = detail::ascii_lower(detail::collapse_whitespace(std::string(text)));
  for (unsigned i = 0; i < 12; ++i) {
    if (lowered.rfind(kMonths[i], 0) == 0) return i + 1;
  }
  return 0;
}

std::optional<Date> pub_date(const Element& e) {
  const Element* y = e.child("year");
  if (!y) return std::nullopt;
  const auto year = parse_positive(y->all_text());
  if (!year || *year > 9999) return std::nullopt;
  unsigned month = 1;
  unsigned day = 1;
  if (const Element* m = e.child("month")) month = month_value(m->all_text());
  if (month == 0) return std::nullopt;
  if (const Element* d = e.child("day")) {
    const auto v = parse_positive(d->all_text());
    if (!v || *v > 31) return std::nullopt;
    day = static_cast<unsigned>(*v);
  }
  const Date date{std::chrono::year{static_cast<int>(*year)}, std::chrono::month{month},
                  std::chrono::day{day}};
  if (!date.ok()) return std::nullopt;
  return date;
}

bool is_results_section(const Element& sec) {
  if (const auto* type = sec.attribute("sec-type")) {
    if (detail::ascii_lower(*type).find("results") != std::string::npos) return true;
  }
  if (const Element* title = sec.child("title")) {
    return fold(title->all_text()).rfind("results", 0) == 0;
  }
  return false;
}

void collect_rids(const Element& sec, std::set<std::string>& rids) {
  sec.walk([&](const Element& e) {
    if (e.name != "xref") return;
    const auto* type = e.attribute("ref-type");
    const auto* rid = e.attribute("rid");
    if (!type || *type != "bibr" || !rid) return;
    std::istringstream ids(*rid);
    for (std::string id; ids >> id;) rids.insert(id);
  });
}

std::map<std::string, Pmid> reference_pmids(const Element& root) {
  std::map<std::string, Pmid> out;
  root.walk([&](const Element& ref) {
    if (ref.name != "ref") return;
    const auto* id = ref.attribute("id");
    if (!id) return;
    ref.walk([&](const Element& e) {
      if (e.name != "pub-id" || out.count(*id)) return;
      const auto* type = e.attribute("pub-id-type");
      if (type && *type == "pmid") {
        if (const auto pmid = parse_positive(e.all_text())) out.emplace(*id, *pmid);
      }
    });
  });
  return out;
}

}  // namespace

void Topic::validate() const {
  if (gold_pmids.empty()) throw DataError("topic " + topic_id + ": gold set is empty");
  if (const auto own = parse_positive(topic_id); own && gold_pmids.contains(*own)) {
    throw DataError("topic " + topic_id + ": gold set contains the topic's own id");
  }
}

std::string_view to_string(SkipReason reason) noexcept {
  switch (reason) {
    case SkipReason::not_systematic_review: return "not_systematic_review";
    case SkipReason::no_article_pmid: return "no_article_pmid";
    case SkipReason::no_publication_date: return "no_publication_date";
    case SkipReason::no_results_section: return "no_results_section";
    case SkipReason::no_resolvable_pmids: return "no_resolvable_pmids";
  }
  return "?";
}

Extraction extract_topic(std::string_view pmc_xml) {
  const auto root = xml::parse(pmc_xml);
  Extraction out;
  auto skip = [&out](SkipReason r) {
    out.skip = r;
    return out;
  };

  const Element* article = root->name == "article" ? root.get() : find_first(*root, "article");
  if (!article || !is_systematic_review(*article)) return skip(SkipReason::not_systematic_review);

  const Element* meta = find_first(*article, "article-meta");
  const auto own = meta ? article_pmid(*meta) : std::nullopt;
  if (!own) return skip(SkipReason::no_article_pmid);

  std::vector<Date> dates;
  meta->walk([&](const Element& e) {
    if (e.name == "pub-date") {
      if (const auto d = pub_date(e)) dates.push_back(*d);
    }
  });
  if (dates.empty()) return skip(SkipReason::no_publication_date);
  out.multiple_dates =
      std::any_of(dates.begin(), dates.end(), [&](const Date& d) { return d != dates.front(); });

  std::set<std::string> rids;
  bool any_results = false;
  if (const Element* body = find_first(*article, "body")) {
    body->walk([&](const Element& e) {
      if (e.name == "sec" && is_results_section(e)) {
        any_results = true;
        collect_rids(e, rids);
      }
    });
  }
  if (!any_results) return skip(SkipReason::no_results_section);

  const auto refs = reference_pmids(*article);
  std::vector<Pmid> gold;
  for (const auto& rid : rids) {
    const auto it = refs.find(rid);
    if (it == refs.end()) {
      ++out.unresolved;
    } else if (it->second != *own) {
      gold.push_back(it->second);
    }
  }
  out.citations = rids.size();
  if (gold.empty()) return skip(SkipReason::no_resolvable_pmids);

  Topic topic;
  topic.topic_id = std::to_string(*own);
  if (const Element* title = find_first(*meta, "article-title")) {
    topic.title = detail::collapse_whitespace(title->all_text());
  }
  topic.publication_date = *std::min_element(dates.begin(), dates.end());
  topic.gold_pmids = PmidSet(std::move(gold));
  out.topic = std::move(topic);
  return out;
}

IngestResult ingest_directory(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".xml" || ext == ".nxml")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  IngestResult result;
  std::map<std::string, Topic> by_id;
  for (const auto& path : files) {
    ++result.report.files;
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (!in) {
      result.report.errors.push_back(path.string() + ": cannot read file");
      continue;
    }
    try {
      Extraction ex = extract_topic(buffer.str());
      result.report.unresolved_citations += ex.unresolved;
      if (ex.skip) {
        ++result.report.skipped[std::string(to_string(*ex.skip))];
        continue;
      }
      if (ex.multiple_dates) result.report.multiple_date_topics.push_back(ex.topic->topic_id);
      const std::string id = ex.topic->topic_id;
      if (by_id.emplace(id, std::move(*ex.topic)).second) ++result.report.extracted;
    } catch (const DataError& e) {
      result.report.errors.push_back(path.string() + ": " + e.what());
    }
  }
  std::sort(result.report.multiple_date_topics.begin(), result.report.multiple_date_topics.end());
  for (auto& [id, topic] : by_id) result.topics.push_back(std::move(topic));
  return result;
}

OverlapResult exclude_overlaps(const std::vector<Topic>& topics,
                               const std::set<std::string>& exclusion_ids) {
  OverlapResult out;
  for (const Topic& t : topics) {
    if (exclusion_ids.count(t.topic_id)) {
      out.removed.push_back(t.topic_id);
    } else {
      out.kept.push_back(t);
    }
  }
  return out;
}

std::set<std::string> read_id_list(std::istream& in) {
  std::set<std::string> ids;
  for (std::string line; std::getline(in, line);) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    for (std::string id; words >> id;) ids.insert(id);
  }
  return ids;
}

void SplitSpec::validate() const {
  if (!train_end.ok() || !test_start.ok() || !pubtemp_start.ok()) {
    throw ContractError("split dates must be valid calendar dates");
  }
  if (!(train_end < test_start)) throw ContractError("train_end must precede test_start");
  if (!(test_start <= pubtemp_start)) throw ContractError("pubtemp_start must not precede test_start");
}

Split temporal_split(const std::vector<Topic>& topics, const SplitSpec& spec) {
  spec.validate();
  Split out;
  std::vector<const Topic*> eligible;
  for (const Topic& t : topics) {
    const Date d = t.publication_date;
    if (d <= spec.train_end) {
      out.train.push_back(t);
    } else if (d >= spec.test_start) {
      out.test.push_back(t);
      if (d >= spec.pubtemp_start) eligible.push_back(&t);
    } else {
      throw DataError("topic " + t.topic_id + " dated " + format_date(d) +
                      " falls between train_end and test_start");
    }
  }

  std::sort(eligible.begin(), eligible.end(),
            [](const Topic* a, const Topic* b) { return a->topic_id < b->topic_id; });
  const std::size_t k = std::min(spec.pubtemp_sample, eligible.size());
  std::mt19937_64 engine(spec.seed);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + uniform_index(engine, eligible.size() - i);
    std::swap(eligible[i], eligible[j]);
  }
  eligible.resize(k);
  std::sort(eligible.begin(), eligible.end(),
            [](const Topic* a, const Topic* b) { return a->topic_id < b->topic_id; });
  for (const Topic* t : eligible) out.pubtemp.push_back(*t);
  return out;
}

void to_json(nlohmann::json& j, const Topic& t) {
  j = nlohmann::json{{"id", t.topic_id},
                     {"title", t.title},
                     {"date", format_date(t.publication_date)},
                     {"gold", t.gold_pmids.ids()}};
}

void from_json(const nlohmann::json& j, Topic& t) {
  t.topic_id = j.at("id").get<std::string>();
  t.title = j.at("title").get<std::string>();
  t.publication_date = parse_date(j.at("date").get<std::string>());
  t.gold_pmids = PmidSet(j.at("gold").get<std::vector<Pmid>>());
}

std::vector<Topic> read_topics(std::istream& in) {
  std::vector<Topic> topics;
  std::size_t number = 0;
  for (std::string line; std::getline(in, line);) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      Topic t = nlohmann::json::parse(line).get<Topic>();
      if (t.topic_id.empty()) throw DataError("empty topic id");
      t.validate();
      topics.push_back(std::move(t));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("line " + std::to_string(number) + ": " + e.what(), number);
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(number) + ": " + e.what(), number);
    }
  }
  return topics;
}

std::vector<Topic> load_topics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open topics file " + path.string());
  return read_topics(in);
}

void write_topics(std::ostream& out, const std::vector<Topic>& topics) {
  for (const Topic& t : topics) out << nlohmann::json(t).dump() << '\n';
}

void store_topics(const std::vector<Topic>& topics, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write topics file " + path.string());
  write_topics(out, topics);
  if (!out) throw std::runtime_error("failed writing topics file " + path.string());
}

void to_json(nlohmann::json& j, const IngestReport& r) {
  j = nlohmann::json{{"files", r.files},
                     {"extracted", r.extracted},
                     {"skipped", r.skipped},
                     {"unresolved_citations", r.unresolved_citations},
                     {"multiple_date_topics", r.multiple_date_topics},
                     {"errors", r.errors}};
}

}  // namespace boolsearch
