#include "boolsearch/entrez.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>
#include <unordered_set>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "boolsearch/errors.hpp"

namespace boolsearch {

namespace {

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw TransportError("invalid URL: " + url, 0, false);
  const auto path = url.find('/', scheme + 3);
  if (path == std::string::npos) return {url, "/"};
  return {url.substr(0, path), url.substr(path)};
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

std::size_t parse_size(const nlohmann::json& v) {
  if (v.is_number_unsigned()) return v.get<std::size_t>();
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    std::size_t out = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec == std::errc() && ptr == s.data() + s.size()) return out;
  }
  throw TransportError("malformed esearch response: bad count", 200, true);
}

}  // namespace

HttpResponse HttpTransport::get(const std::string& url) {
  const auto [origin, target] = split_url(url);
  httplib::Client client(origin);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_follow_location(true);
  auto result = client.Get(target);
  if (!result) {
    throw TransportError("request failed: " + httplib::to_string(result.error()), 0, true);
  }
  return {result->status, result->body};
}

CassetteTransport::CassetteTransport(std::vector<Interaction> interactions)
    : interactions_(std::move(interactions)) {}

HttpResponse CassetteTransport::get(const std::string& url) {
  const std::string key = redact_api_key(url);
  std::lock_guard lock(mutex_);
  ++requests_;
  for (const auto& i : interactions_) {
    if (i.url == key) return {i.status, i.body};
  }
  throw TransportError("no recorded interaction for " + key, 0, false);
}

std::size_t CassetteTransport::requests() const {
  std::lock_guard lock(mutex_);
  return requests_;
}

HttpResponse RecordingTransport::get(const std::string& url) {
  HttpResponse response = inner_.get(url);
  std::lock_guard lock(mutex_);
  interactions_.push_back({redact_api_key(url), response.status, response.body});
  return response;
}

std::vector<Interaction> RecordingTransport::interactions() const {
  std::lock_guard lock(mutex_);
  return interactions_;
}

void RecordingTransport::save(const std::filesystem::path& path) const {
  write_cassette(path, interactions());
}

std::vector<Interaction> read_cassette(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open cassette " + path.string());
  std::vector<Interaction> out;
  try {
    const auto doc = nlohmann::json::parse(in);
    for (const auto& i : doc.at("interactions")) {
      out.push_back({i.at("url").get<std::string>(), i.at("status").get<int>(),
                     i.at("body").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed cassette " + path.string() + ": " + e.what());
  }
  return out;
}

void write_cassette(const std::filesystem::path& path, const std::vector<Interaction>& interactions) {
  nlohmann::json doc;
  auto& list = doc["interactions"] = nlohmann::json::array();
  for (const auto& i : interactions) {
    list.push_back({{"url", i.url}, {"status", i.status}, {"body", i.body}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write cassette " + path.string());
  out << doc.dump(2) << '\n';
}

std::string redact_api_key(const std::string& url) {
  std::string out = url;
  for (std::size_t pos = 0; (pos = out.find("api_key=", pos)) != std::string::npos;) {
    if (pos > 0 && out[pos - 1] != '?' && out[pos - 1] != '&') {
      pos += 8;
      continue;
    }
    const auto begin = pos + 8;
    const auto end = std::min(out.find('&', begin), out.size());
    out.replace(begin, end - begin, "REDACTED");
    pos = begin + 8;
  }
  return out;
}

std::string url_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(text.size() * 3);
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

Clock::duration SystemClock::now() {
  return std::chrono::duration_cast<duration>(std::chrono::steady_clock::now().time_since_epoch());
}

void SystemClock::sleep_for(duration d) { std::this_thread::sleep_for(d); }

Clock::duration ManualClock::now() {
  std::lock_guard lock(mutex_);
  return now_;
}

void ManualClock::sleep_for(duration d) {
  std::lock_guard lock(mutex_);
  if (d > duration::zero()) now_ += d;
}

RateLimiter::RateLimiter(double requests_per_second, Clock& clock)
    : rate_(requests_per_second), clock_(clock) {
  if (!(requests_per_second > 0.0) || !std::isfinite(requests_per_second)) {
    throw ContractError("rate limit must be positive");
  }
  interval_ = Clock::duration(static_cast<Clock::duration::rep>(std::ceil(1e9 / requests_per_second)));
}

void RateLimiter::acquire() {
  std::lock_guard lock(mutex_);
  auto now = clock_.now();
  if (next_ && now < *next_) {
    clock_.sleep_for(*next_ - now);
    now = std::max(clock_.now(), *next_);
  }
  next_ = now + interval_;
}

void EntrezConfig::validate() const {
  if (!(effective_rate() > 0.0)) throw ContractError("rate limit must be positive");
  if (page_size == 0) throw ContractError("page size must be positive");
  if (max_ids == 0) throw ContractError("max_ids must be positive");
  if (max_retries < 0) throw ContractError("max_retries must be non-negative");
  if (base_url.find("://") == std::string::npos) throw ContractError("base_url must be absolute");
}

EntrezConfig EntrezConfig::from_environment() {
  EntrezConfig cfg;
  if (const char* key = std::getenv("NCBI_API_KEY"); key && *key) cfg.api_key = key;
  return cfg;
}

EntrezClient::EntrezClient(EntrezConfig config, Transport& transport, Clock& clock)
    : config_(std::move(config)),
      transport_(transport),
      clock_(clock),
      limiter_((config_.validate(), config_.effective_rate()), clock) {}

std::string EntrezClient::apply_cutoff(const std::string& query, std::optional<Date> cutoff) {
  if (!cutoff) return query;
  std::string date = format_date(*cutoff);
  std::replace(date.begin(), date.end(), '-', '/');
  return "(" + query + ") AND 1800/01/01:" + date + "[dp]";
}

std::string EntrezClient::build_url(const std::string& term, std::size_t retstart,
                                    std::size_t retmax) const {
  std::string url = config_.base_url;
  url += "?db=pubmed&term=" + url_encode(term) + "&retmode=json";
  url += "&retstart=" + std::to_string(retstart) + "&retmax=" + std::to_string(retmax);
  if (config_.api_key) url += "&api_key=" + url_encode(*config_.api_key);
  return url;
}

EntrezClient::Page EntrezClient::request(const std::string& term, std::size_t retstart,
                                         std::size_t retmax) {
  const std::string url = build_url(term, retstart, retmax);
  for (int attempt = 0;; ++attempt) {
    try {
      limiter_.acquire();
      const HttpResponse response = transport_.get(url);
      if (response.status != 200) {
        throw TransportError("esearch returned HTTP " + std::to_string(response.status),
                             response.status, retryable_status(response.status));
      }
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(response.body);
      } catch (const nlohmann::json::parse_error&) {
        throw TransportError("malformed esearch response", response.status, true);
      }
      if (doc.contains("error")) {
        throw QueryRejected(QueryRejected::Reason::unparseable, doc["error"].dump());
      }
      if (!doc.contains("esearchresult") || !doc["esearchresult"].is_object()) {
        throw TransportError("malformed esearch response: no esearchresult", response.status, true);
      }
      const auto& result = doc["esearchresult"];
      if (result.contains("ERROR")) {
        throw QueryRejected(QueryRejected::Reason::unparseable, result["ERROR"].dump());
      }
      Page page;
      page.count = parse_size(result.value("count", nlohmann::json()));
      if (const auto it = result.find("idlist"); it != result.end() && it->is_array()) {
        for (const auto& id : *it) page.ids.push_back(parse_size(id));
      }
      return page;
    } catch (const TransportError& e) {
      if (!e.retryable() || attempt >= config_.max_retries) throw;
      clock_.sleep_for(config_.retry_backoff * (1 << std::min(attempt, 10)));
    }
  }
}

std::size_t EntrezClient::esearch_count(const std::string& query, std::optional<Date> cutoff) {
  if (query.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ContractError("query must not be empty");
  }
  return request(apply_cutoff(query, cutoff ? cutoff : config_.date_cutoff), 0, 0).count;
}

IdResult EntrezClient::esearch_ids(const std::string& query, std::optional<Date> cutoff) {
  if (query.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ContractError("query must not be empty");
  }
  const std::string term = apply_cutoff(query, cutoff ? cutoff : config_.date_cutoff);
  IdResult out;
  std::unordered_set<Pmid> seen;
  std::size_t retstart = 0;
  std::size_t target = config_.max_ids;
  bool first = true;
  while (first || retstart < target) {
    const std::size_t retmax = std::min(config_.page_size, target - retstart);
    Page page = request(term, retstart, retmax);
    if (first) {
      out.count = page.count;
      out.truncated = page.count > config_.max_ids;
      target = std::min(page.count, config_.max_ids);
      first = false;
    }
    for (Pmid id : page.ids) {
      if (out.ids.size() < target && seen.insert(id).second) out.ids.push_back(id);
    }
    if (page.ids.empty()) break;
    retstart += page.ids.size();
  }
  return out;
}

}  // namespace boolsearch
