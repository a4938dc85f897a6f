#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "boolsearch/date.hpp"
#include "boolsearch/pmid_set.hpp"

namespace boolsearch {

struct Topic {
  std::string topic_id;  ///< PMID of the source review
  std::string title;
  Date publication_date{};
  PmidSet gold_pmids;

  /// Throws DataError when the gold set is empty or contains the topic's own id.
  void validate() const;

  bool operator==(const Topic&) const = default;
};

enum class SkipReason {
  not_systematic_review,
  no_article_pmid,
  no_publication_date,
  no_results_section,
  no_resolvable_pmids,
};

std::string_view to_string(SkipReason reason) noexcept;

struct Extraction {
  std::optional<Topic> topic;       ///< set iff skip is empty
  std::optional<SkipReason> skip;
  std::size_t citations = 0;        ///< distinct reference ids cited in results sections
  std::size_t unresolved = 0;       ///< of those, references without a PMID
  bool multiple_dates = false;      ///< the article carried more than one publication date
};

/// Reads one PMC article. Throws DataError with line/column on malformed XML.
Extraction extract_topic(std::string_view pmc_xml);

struct IngestReport {
  std::size_t files = 0;
  std::size_t extracted = 0;
  std::map<std::string, std::size_t> skipped;  ///< by skip reason name
  std::size_t unresolved_citations = 0;
  std::vector<std::string> multiple_date_topics;
  std::vector<std::string> errors;  ///< "file: message" for malformed files
};

struct IngestResult {
  std::vector<Topic> topics;  ///< sorted by topic_id, first file wins on duplicate ids
  IngestReport report;
};

/// Extracts every *.xml / *.nxml file under `dir` (recursively), in path order.
IngestResult ingest_directory(const std::filesystem::path& dir);

struct OverlapResult {
  std::vector<Topic> kept;
  std::vector<std::string> removed;  ///< ids removed, in input order
};

OverlapResult exclude_overlaps(const std::vector<Topic>& topics,
                               const std::set<std::string>& exclusion_ids);

/// One id per line; blank lines and `#` comments ignored.
std::set<std::string> read_id_list(std::istream& in);

struct SplitSpec {
  Date train_end = Date{std::chrono::year{2021}, std::chrono::October, std::chrono::day{30}};
  Date test_start = Date{std::chrono::year{2021}, std::chrono::October, std::chrono::day{31}};
  Date pubtemp_start = Date{std::chrono::year{2024}, std::chrono::November, std::chrono::day{1}};
  std::size_t pubtemp_sample = 1000;
  std::uint64_t seed = 0;

  /// Throws ContractError unless train_end < test_start <= pubtemp_start.
  void validate() const;
};

struct Split {
  std::vector<Topic> train;
  std::vector<Topic> test;
  std::vector<Topic> pubtemp;  ///< subset of test, sorted by topic_id
};

/// Throws DataError when a topic falls strictly between train_end and test_start.
Split temporal_split(const std::vector<Topic>& topics, const SplitSpec& spec);

/// Uniform index in [0, n), n > 0, from a 64-bit generator by rejection. Stable across platforms.
template <typename Engine>
std::uint64_t uniform_index(Engine& engine, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
  std::uint64_t x;
  do {
    x = engine();
  } while (x < threshold);
  return x % n;
}

// JSON-lines: {"date", "gold", "id", "title"}, keys in sorted order.
void to_json(nlohmann::json& j, const Topic& topic);
void from_json(const nlohmann::json& j, Topic& topic);

/// Throws DataError naming the 1-based line on a malformed or invalid topic.
std::vector<Topic> read_topics(std::istream& in);
std::vector<Topic> load_topics(const std::filesystem::path& path);
void write_topics(std::ostream& out, const std::vector<Topic>& topics);
void store_topics(const std::vector<Topic>& topics, const std::filesystem::path& path);

void to_json(nlohmann::json& j, const IngestReport& report);

}  // namespace boolsearch
