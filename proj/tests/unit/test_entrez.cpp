#include <gtest/gtest.h>

#include <deque>
#include <filesystem>
#include <functional>
#include <thread>

#include <nlohmann/json.hpp>

#include "boolsearch/entrez.hpp"
#include "boolsearch/errors.hpp"

namespace bs = boolsearch;
namespace fs = std::filesystem;
using namespace std::chrono_literals;

namespace {

const fs::path kFixtures = BOOLSEARCH_FIXTURE_DIR;

// Answers every request through a callback and keeps the URLs it saw.
class FakeTransport final : public bs::Transport {
 public:
  explicit FakeTransport(std::function<bs::HttpResponse(const std::string&)> respond)
      : respond_(std::move(respond)) {}
  bs::HttpResponse get(const std::string& url) override {
    urls.push_back(url);
    return respond_(url);
  }
  std::vector<std::string> urls;

 private:
  std::function<bs::HttpResponse(const std::string&)> respond_;
};

std::size_t param(const std::string& url, const std::string& name) {
  const auto at = url.find("&" + name + "=");
  return std::stoul(url.substr(at + name.size() + 2));
}

// Serves `total` ids (1..total) honouring retstart/retmax.
bs::HttpResponse paged(const std::string& url, std::size_t total) {
  const std::size_t start = param(url, "retstart"), max = param(url, "retmax");
  nlohmann::json ids = nlohmann::json::array();
  for (std::size_t i = start; i < std::min(total, start + max); ++i) ids.push_back(std::to_string(i + 1));
  nlohmann::json body{{"esearchresult", {{"count", std::to_string(total)}, {"idlist", ids}}}};
  return {200, body.dump()};
}

bs::EntrezConfig quick_config() {
  bs::EntrezConfig cfg;
  cfg.base_url = "http://test.invalid/esearch.fcgi";
  cfg.retry_backoff = 1ms;
  return cfg;
}

}  // namespace

TEST(Cassette, CountAndIdsReplay) {
  bs::CassetteTransport transport(bs::read_cassette(kFixtures / "cassette.json"));
  bs::ManualClock clock;
  bs::EntrezClient client(bs::EntrezConfig{}, transport, clock);
  EXPECT_EQ(client.esearch_count("asthma[mh]"), 3u);
  const auto ids = client.esearch_ids("asthma[mh]");
  EXPECT_EQ(ids.ids, (std::vector<bs::Pmid>{38000003, 38000001, 38000002}));
  EXPECT_EQ(ids.count, 3u);
  EXPECT_FALSE(ids.truncated);
  EXPECT_EQ(transport.requests(), 2u);
}

TEST(Cassette, ApiKeyIsRedactedForMatching) {
  bs::CassetteTransport transport(bs::read_cassette(kFixtures / "cassette.json"));
  bs::ManualClock clock;
  bs::EntrezConfig cfg;
  cfg.api_key = "secret-key-123";
  bs::EntrezClient client(cfg, transport, clock);
  const auto ids = client.esearch_ids("zzqx[tiab]");
  EXPECT_TRUE(ids.ids.empty());
  EXPECT_EQ(ids.count, 0u);
}

TEST(Cassette, UnknownUrlIsNotRetried) {
  bs::CassetteTransport transport(bs::read_cassette(kFixtures / "cassette.json"));
  bs::ManualClock clock;
  bs::EntrezClient client(bs::EntrezConfig{}, transport, clock);
  try {
    client.esearch_count("never recorded");
    FAIL();
  } catch (const bs::TransportError& e) {
    EXPECT_FALSE(e.retryable());
  }
  EXPECT_EQ(transport.requests(), 1u);
}

TEST(Cassette, ServiceQueryErrorIsRejection) {
  bs::CassetteTransport transport(bs::read_cassette(kFixtures / "cassette.json"));
  bs::ManualClock clock;
  bs::EntrezClient client(bs::EntrezConfig{}, transport, clock);
  EXPECT_THROW(client.esearch_count("bad(("), bs::QueryRejected);
}

TEST(Cassette, WriteReadRoundTripAndRecording) {
  FakeTransport inner([](const std::string& url) { return paged(url, 2); });
  bs::RecordingTransport recorder(inner);
  bs::ManualClock clock;
  bs::EntrezConfig cfg = quick_config();
  cfg.api_key = "abc";
  bs::EntrezClient client(cfg, recorder, clock);
  client.esearch_ids("x");
  const fs::path path = fs::temp_directory_path() / "boolsearch_cassette_test.json";
  recorder.save(path);
  const auto loaded = bs::read_cassette(path);
  ASSERT_EQ(loaded.size(), 1u);
  EXPECT_NE(loaded[0].url.find("api_key=REDACTED"), std::string::npos);
  EXPECT_EQ(loaded[0].url.find("abc"), std::string::npos);
  bs::CassetteTransport replay(loaded);
  bs::EntrezClient again(cfg, replay, clock);
  EXPECT_EQ(again.esearch_ids("x").ids, (std::vector<bs::Pmid>{1, 2}));
  fs::remove(path);
}

TEST(Client, EmptyQueryFailsBeforeAnyRequest) {
  FakeTransport transport([](const std::string& url) { return paged(url, 1); });
  bs::ManualClock clock;
  bs::EntrezClient client(quick_config(), transport, clock);
  EXPECT_THROW(client.esearch_count(""), bs::ContractError);
  EXPECT_THROW(client.esearch_ids("  \n"), bs::ContractError);
  EXPECT_TRUE(transport.urls.empty());
}

TEST(Client, PagingFetchesEveryId) {
  FakeTransport transport([](const std::string& url) { return paged(url, 250); });
  bs::ManualClock clock;
  bs::EntrezConfig cfg = quick_config();
  cfg.page_size = 100;
  bs::EntrezClient client(cfg, transport, clock);
  const auto result = client.esearch_ids("x");
  EXPECT_EQ(transport.urls.size(), 3u);
  EXPECT_EQ(result.ids.size(), 250u);
  EXPECT_EQ(result.ids.front(), 1u);
  EXPECT_EQ(result.ids.back(), 250u);
  EXPECT_EQ(param(transport.urls[2], "retstart"), 200u);
  EXPECT_EQ(param(transport.urls[2], "retmax"), 50u);
}

TEST(Client, CountZeroGivesEmptyList) {
  FakeTransport transport([](const std::string& url) { return paged(url, 0); });
  bs::ManualClock clock;
  bs::EntrezClient client(quick_config(), transport, clock);
  const auto result = client.esearch_ids("x");
  EXPECT_TRUE(result.ids.empty());
  EXPECT_EQ(transport.urls.size(), 1u);
}

TEST(Client, TruncatesAtMaxIds) {
  FakeTransport transport([](const std::string& url) { return paged(url, 1000); });
  bs::ManualClock clock;
  bs::EntrezConfig cfg = quick_config();
  cfg.max_ids = 150;
  cfg.page_size = 100;
  bs::EntrezClient client(cfg, transport, clock);
  const auto result = client.esearch_ids("x");
  EXPECT_TRUE(result.truncated);
  EXPECT_EQ(result.count, 1000u);
  EXPECT_EQ(result.ids.size(), 150u);
  EXPECT_EQ(transport.urls.size(), 2u);
}

TEST(Client, DuplicateIdsAcrossPagesAreDropped) {
  FakeTransport transport([](const std::string& url) {
    const std::size_t start = param(url, "retstart");
    nlohmann::json ids = start == 0 ? nlohmann::json{"1", "2"} : nlohmann::json{"2", "3"};
    return bs::HttpResponse{200, nlohmann::json{{"esearchresult", {{"count", "4"}, {"idlist", ids}}}}.dump()};
  });
  bs::ManualClock clock;
  bs::EntrezConfig cfg = quick_config();
  cfg.page_size = 2;
  bs::EntrezClient client(cfg, transport, clock);
  EXPECT_EQ(client.esearch_ids("x").ids, (std::vector<bs::Pmid>{1, 2, 3}));
}

TEST(Client, UrlIsReproducibleAndOrdered) {
  FakeTransport transport([](const std::string& url) { return paged(url, 1); });
  bs::ManualClock clock;
  bs::EntrezConfig cfg;
  cfg.api_key = "k y";
  bs::EntrezClient client(cfg, transport, clock);
  EXPECT_EQ(client.build_url("a[ti] AND b*", 10, 20),
            "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/esearch.fcgi?db=pubmed&term=a%5Bti%5D%20AND%20b%2A"
            "&retmode=json&retstart=10&retmax=20&api_key=k%20y");
  EXPECT_EQ(client.build_url("q", 0, 0), client.build_url("q", 0, 0));
}

TEST(Client, DateCutoffClause) {
  const bs::Date d{std::chrono::year{2021}, std::chrono::month{3}, std::chrono::day{7}};
  EXPECT_EQ(bs::EntrezClient::apply_cutoff("a OR b", d), "(a OR b) AND 1800/01/01:2021/03/07[dp]");
  EXPECT_EQ(bs::EntrezClient::apply_cutoff("a", std::nullopt), "a");
  FakeTransport transport([](const std::string& url) { return paged(url, 1); });
  bs::ManualClock clock;
  bs::EntrezConfig cfg = quick_config();
  cfg.date_cutoff = d;
  bs::EntrezClient client(cfg, transport, clock);
  client.esearch_count("a");
  EXPECT_NE(transport.urls[0].find("2021%2F03%2F07%5Bdp%5D"), std::string::npos);
}

TEST(Client, RetriesTransientFailures) {
  int calls = 0;
  FakeTransport transport([&](const std::string& url) {
    ++calls;
    if (calls == 1) return bs::HttpResponse{429, ""};
    if (calls == 2) return bs::HttpResponse{200, "<html>oops"};
    return paged(url, 7);
  });
  bs::ManualClock clock;
  bs::EntrezClient client(quick_config(), transport, clock);
  EXPECT_EQ(client.esearch_count("x"), 7u);
  EXPECT_EQ(calls, 3);
}

TEST(Client, GivesUpAfterMaxRetries) {
  FakeTransport transport([](const std::string&) { return bs::HttpResponse{503, ""}; });
  bs::ManualClock clock;
  bs::EntrezConfig cfg = quick_config();
  cfg.max_retries = 2;
  bs::EntrezClient client(cfg, transport, clock);
  try {
    client.esearch_count("x");
    FAIL();
  } catch (const bs::TransportError& e) {
    EXPECT_EQ(e.status(), 503);
  }
  EXPECT_EQ(transport.urls.size(), 3u);
}

TEST(Client, ClientErrorsAreNotRetried) {
  FakeTransport transport([](const std::string&) { return bs::HttpResponse{400, ""}; });
  bs::ManualClock clock;
  bs::EntrezClient client(quick_config(), transport, clock);
  EXPECT_THROW(client.esearch_count("x"), bs::TransportError);
  EXPECT_EQ(transport.urls.size(), 1u);
}

TEST(Client, TopLevelErrorIsRejection) {
  FakeTransport transport([](const std::string&) { return bs::HttpResponse{200, R"({"error":"bad term"})"}; });
  bs::ManualClock clock;
  bs::EntrezClient client(quick_config(), transport, clock);
  try {
    client.esearch_count("x");
    FAIL();
  } catch (const bs::QueryRejected& e) {
    EXPECT_EQ(e.reason(), bs::QueryRejected::Reason::unparseable);
  }
}

TEST(RateLimit, TenCallsAtThreePerSecondTakeThreeSeconds) {
  bs::ManualClock clock;
  FakeTransport transport([](const std::string& url) { return paged(url, 1); });
  bs::EntrezConfig cfg = quick_config();
  cfg.rate_limit = 3.0;
  bs::EntrezClient client(cfg, transport, clock);
  const auto start = clock.now();
  for (int i = 0; i < 10; ++i) client.esearch_count("x");
  EXPECT_GE(clock.now() - start, 3s);
}

TEST(RateLimit, SpacingHoldsUnderThreads) {
  bs::ManualClock clock;
  bs::RateLimiter limiter(10.0, clock);
  std::vector<bs::Clock::duration> stamps;
  std::mutex m;
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 5; ++i) {
        limiter.acquire();
        std::lock_guard lock(m);
        stamps.push_back(clock.now());
      }
    });
  }
  for (auto& t : threads) t.join();
  std::sort(stamps.begin(), stamps.end());
  for (std::size_t i = 1; i < stamps.size(); ++i) EXPECT_GE(stamps[i] - stamps[i - 1], 100ms);
}

TEST(RateLimit, DefaultsDependOnApiKey) {
  bs::EntrezConfig cfg;
  EXPECT_EQ(cfg.effective_rate(), 3.0);
  cfg.api_key = "k";
  EXPECT_EQ(cfg.effective_rate(), 10.0);
  cfg.rate_limit = 1.5;
  EXPECT_EQ(cfg.effective_rate(), 1.5);
  bs::ManualClock clock;
  EXPECT_THROW(bs::RateLimiter(0.0, clock), bs::ContractError);
}

TEST(Helpers, RedactAndEncode) {
  EXPECT_EQ(bs::redact_api_key("http://h/x?db=pubmed&api_key=abc123"), "http://h/x?db=pubmed&api_key=REDACTED");
  EXPECT_EQ(bs::redact_api_key("http://h/x?api_key=abc&term=a"), "http://h/x?api_key=REDACTED&term=a");
  EXPECT_EQ(bs::redact_api_key("http://h/x?term=a"), "http://h/x?term=a");
  EXPECT_EQ(bs::url_encode("a-b_c.d~e f/(g)"), "a-b_c.d~e%20f%2F%28g%29");
  EXPECT_EQ(bs::url_encode("é"), "%C3%A9");
}

TEST(Config, ValidationAndEnvironment) {
  bs::EntrezConfig cfg;
  cfg.page_size = 0;
  EXPECT_THROW(cfg.validate(), bs::ContractError);
  cfg = {};
  cfg.base_url = "not a url";
  EXPECT_THROW(cfg.validate(), bs::ContractError);
  ::setenv("NCBI_API_KEY", "from-env", 1);
  EXPECT_EQ(bs::EntrezConfig::from_environment().api_key, "from-env");
  ::setenv("NCBI_API_KEY", "", 1);
  EXPECT_FALSE(bs::EntrezConfig::from_environment().api_key.has_value());
  ::unsetenv("NCBI_API_KEY");
}
