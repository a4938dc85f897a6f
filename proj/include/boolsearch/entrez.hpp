#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "boolsearch/date.hpp"
#include "boolsearch/pmid_set.hpp"

namespace boolsearch {

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Performs one GET of a fully built URL. Throws TransportError on connection failure.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse get(const std::string& url) = 0;
};

class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(std::chrono::seconds timeout = std::chrono::seconds(30))
      : timeout_(timeout) {}
  HttpResponse get(const std::string& url) override;

 private:
  std::chrono::seconds timeout_;
};

struct Interaction {
  std::string url;  ///< api_key redacted
  int status = 200;
  std::string body;
};

/// Replays recorded interactions keyed by redacted URL. An unknown URL is a
/// non-retryable TransportError.
class CassetteTransport final : public Transport {
 public:
  explicit CassetteTransport(std::vector<Interaction> interactions);

  HttpResponse get(const std::string& url) override;
  std::size_t requests() const;

 private:
  std::vector<Interaction> interactions_;
  mutable std::mutex mutex_;
  std::size_t requests_ = 0;
};

/// Forwards to another transport and keeps every exchange for saving as a cassette.
class RecordingTransport final : public Transport {
 public:
  explicit RecordingTransport(Transport& inner) : inner_(inner) {}
  HttpResponse get(const std::string& url) override;
  std::vector<Interaction> interactions() const;
  void save(const std::filesystem::path& path) const;

 private:
  Transport& inner_;
  mutable std::mutex mutex_;
  std::vector<Interaction> interactions_;
};

std::vector<Interaction> read_cassette(const std::filesystem::path& path);
void write_cassette(const std::filesystem::path& path, const std::vector<Interaction>& interactions);

/// Replaces the value of any api_key parameter with "REDACTED".
std::string redact_api_key(const std::string& url);

/// Percent-encodes everything outside the unreserved set.
std::string url_encode(std::string_view text);

class Clock {
 public:
  using duration = std::chrono::nanoseconds;
  virtual ~Clock() = default;
  virtual duration now() = 0;
  virtual void sleep_for(duration d) = 0;
};

class SystemClock final : public Clock {
 public:
  duration now() override;
  void sleep_for(duration d) override;
};

/// Time advances only through sleep_for.
class ManualClock final : public Clock {
 public:
  duration now() override;
  void sleep_for(duration d) override;

 private:
  std::mutex mutex_;
  duration now_{0};
};

/// Spaces successive acquisitions at least 1/rate apart; thread-safe.
class RateLimiter {
 public:
  RateLimiter(double requests_per_second, Clock& clock);
  void acquire();
  double rate() const noexcept { return rate_; }

 private:
  double rate_;
  Clock& clock_;
  Clock::duration interval_;
  std::mutex mutex_;
  std::optional<Clock::duration> next_;
};

struct EntrezConfig {
  std::string base_url = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/esearch.fcgi";
  std::optional<std::string> api_key;
  std::optional<double> rate_limit;  ///< defaults to 3/s, or 10/s with an api key
  std::size_t max_ids = 200000;
  std::size_t page_size = 10000;
  std::optional<Date> date_cutoff;
  int max_retries = 3;
  std::chrono::milliseconds retry_backoff{500};

  double effective_rate() const { return rate_limit.value_or(api_key ? 10.0 : 3.0); }

  /// Throws ContractError unless rate > 0, page_size > 0, max_ids > 0, max_retries >= 0.
  void validate() const;

  /// Defaults with api_key taken from NCBI_API_KEY when set and non-empty.
  static EntrezConfig from_environment();
};

struct IdResult {
  std::vector<Pmid> ids;  ///< deduplicated, in server order
  std::size_t count = 0;  ///< server-reported total
  bool truncated = false;  ///< count exceeded max_ids
};

/// esearch against PubMed. Query errors reported by the service throw
/// QueryRejected(unparseable); HTTP, rate-limit and malformed-response failures throw
/// TransportError after the configured retries. Safe to share between threads.
class EntrezClient {
 public:
  EntrezClient(EntrezConfig config, Transport& transport, Clock& clock);

  /// `cutoff` overrides config.date_cutoff for this call.
  std::size_t esearch_count(const std::string& query, std::optional<Date> cutoff = std::nullopt);
  IdResult esearch_ids(const std::string& query, std::optional<Date> cutoff = std::nullopt);

  /// The exact request URL; parameter order is db, term, retmode, retstart, retmax, api_key.
  std::string build_url(const std::string& term, std::size_t retstart, std::size_t retmax) const;

  /// `(query) AND 1800/01/01:YYYY/MM/DD[dp]` when a cutoff applies, else the query.
  static std::string apply_cutoff(const std::string& query, std::optional<Date> cutoff);

  const EntrezConfig& config() const noexcept { return config_; }

 private:
  struct Page {
    std::size_t count = 0;
    std::vector<Pmid> ids;
  };
  Page request(const std::string& term, std::size_t retstart, std::size_t retmax);

  EntrezConfig config_;
  Transport& transport_;
  Clock& clock_;
  RateLimiter limiter_;
};

}  // namespace boolsearch
