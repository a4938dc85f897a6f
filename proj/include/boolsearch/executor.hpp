#pragma once

#include <optional>
#include <string>

#include "boolsearch/date.hpp"
#include "boolsearch/entrez.hpp"
#include "boolsearch/index.hpp"
#include "boolsearch/pmid_set.hpp"

namespace boolsearch {

struct SearchScope {
  std::optional<Date> max_date;  ///< only documents published on or before this date
};

struct Retrieval {
  PmidSet ids;
  std::size_t count = 0;   ///< total matches, which exceeds ids.size() when truncated
  bool truncated = false;
};

/// Where queries run. count/retrieve throw QueryRejected for queries the backend refuses
/// and TransportError for infrastructure failures.
class Executor {
 public:
  virtual ~Executor() = default;
  virtual std::size_t count(const std::string& query, const SearchScope& scope) = 0;
  virtual Retrieval retrieve(const std::string& query, const SearchScope& scope) = 0;
  /// True when calls leave the process (subject to the per-topic timeout).
  virtual bool remote() const noexcept { return false; }
  /// Stable description for reports, e.g. a corpus fingerprint.
  virtual std::string identity() const = 0;
};

class LocalExecutor final : public Executor {
 public:
  LocalExecutor(const PostingsIndex& index, std::string identity)
      : index_(index), identity_(std::move(identity)) {}

  std::size_t count(const std::string& query, const SearchScope& scope) override;
  Retrieval retrieve(const std::string& query, const SearchScope& scope) override;
  std::string identity() const override { return identity_; }

 private:
  const PostingsIndex& index_;
  std::string identity_;
};

class EntrezExecutor final : public Executor {
 public:
  explicit EntrezExecutor(EntrezClient& client) : client_(client) {}

  std::size_t count(const std::string& query, const SearchScope& scope) override;
  Retrieval retrieve(const std::string& query, const SearchScope& scope) override;
  bool remote() const noexcept override { return true; }
  std::string identity() const override;

 private:
  EntrezClient& client_;
};

}  // namespace boolsearch
