#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = BOOLSEARCH_FIXTURE_DIR;

struct Run {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string quote(const std::string& arg) {
  std::string q = "'";
  for (char c : arg) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Run cli(const std::vector<std::string>& args, const std::string& stdin_text = "") {
  static int counter = 0;
  const fs::path err_path = fs::temp_directory_path() / ("boolsearch_cli_err_" + std::to_string(++counter));
  const fs::path in_path = fs::temp_directory_path() / ("boolsearch_cli_in_" + std::to_string(counter));
  std::ofstream(in_path) << stdin_text;
  std::string command = quote(BOOLSEARCH_CLI);
  for (const auto& a : args) command += " " + quote(a);
  command += " <" + quote(in_path.string()) + " 2>" + quote(err_path.string());
  Run run;
  FILE* pipe = ::popen(command.c_str(), "r");
  std::array<char, 4096> buffer{};
  while (std::size_t n = std::fread(buffer.data(), 1, buffer.size(), pipe)) run.out.append(buffer.data(), n);
  const int status = ::pclose(pipe);
  run.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream err(err_path);
  std::ostringstream e;
  e << err.rdbuf();
  run.err = e.str();
  fs::remove(err_path);
  fs::remove(in_path);
  return run;
}

std::string fixture(const char* name) { return (kFixtures / name).string(); }

}  // namespace

TEST(Cli, ParsePrintsAst) {
  const auto r = cli({"parse", "a[tiab] AND b[mh]"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["ast"]["type"], "and");
  EXPECT_EQ(j["ast"]["children"][0]["tag"], "tiab");
  EXPECT_EQ(j["ast"]["children"][1]["tag"], "mh");
}

TEST(Cli, ParseReadsStdin) {
  const auto r = cli({"fmt", "-"}, "a OR b AND c\n");
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out, "((a OR b) AND c)\n");
}

TEST(Cli, InvalidQueryIsDomainFailure) {
  const auto r = cli({"parse", "(a OR b"});
  EXPECT_EQ(r.exit_code, 1);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({"frobnicate"}).exit_code, 2);
  EXPECT_EQ(cli({"reward", "--topic", "x"}).exit_code, 2);
  EXPECT_EQ(cli({"reward", "--corpus", fixture("corpus.jsonl"), "--topics", fixture("topics.jsonl"),
                 "--topic", "5000004", "--query", "a", "--alpha", "-1"})
                .exit_code,
            2);
}

TEST(Cli, JsonErrorsAreSingleLine) {
  const auto r = cli({"--json", "reward", "--corpus", fixture("corpus.jsonl"), "--topics",
                      fixture("topics.jsonl"), "--topic", "5000004", "--query", "a", "--M", "0"});
  EXPECT_EQ(r.exit_code, 2);
  ASSERT_FALSE(r.err.empty());
  EXPECT_EQ(r.err.find('\n'), r.err.size() - 1);
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["exit_code"], 2);
  EXPECT_TRUE(j.contains("message"));
}

TEST(Cli, DataErrorsCarryLineNumbers) {
  const fs::path bad = fs::temp_directory_path() / "boolsearch_cli_bad_topics.jsonl";
  std::ofstream(bad) << "{\"date\":\"2020-01-01\",\"gold\":[1],\"id\":\"2\",\"title\":\"a\"}\nnot json\n";
  const auto r = cli({"--json", "split", "--topics", bad.string(), "--out-dir",
                      (fs::temp_directory_path() / "boolsearch_cli_split_bad").string()});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(nlohmann::json::parse(r.err)["line"], 2);
  fs::remove(bad);
}

TEST(Cli, RewardOnPerfectFixture) {
  const auto r = cli({"reward", "--corpus", fixture("corpus.jsonl"), "--topics", fixture("topics.jsonl"),
                      "--topic", "5000004", "--query", "statins[ti]", "--alpha", "1"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_DOUBLE_EQ(j["reward"]["r_total"].get<double>(), 40.0);
}

TEST(Cli, RewardConfigFileAndFlagPrecedence) {
  const fs::path cfg = fs::temp_directory_path() / "boolsearch_cli_reward.cfg";
  std::ofstream(cfg) << "M = 5\nvariant = no_precision\n";
  auto r = cli({"reward", "--corpus", fixture("corpus.jsonl"), "--topics", fixture("topics.jsonl"), "--topic",
                "5000004", "--query", "statins[ti]", "--config", cfg.string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_DOUBLE_EQ(nlohmann::json::parse(r.out)["reward"]["r_retrieval"].get<double>(), 5.0);
  r = cli({"reward", "--corpus", fixture("corpus.jsonl"), "--topics", fixture("topics.jsonl"), "--topic",
           "5000004", "--query", "statins[ti]", "--config", cfg.string(), "--M", "8"});
  EXPECT_DOUBLE_EQ(nlohmann::json::parse(r.out)["reward"]["r_retrieval"].get<double>(), 8.0);
  fs::remove(cfg);
}

TEST(Cli, SearchPrintsIds) {
  const auto r = cli({"search", "--corpus", fixture("corpus.jsonl"), "asthma[tiab]"});
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out, "1\n2\n3\n");
  const auto bounded = cli({"search", "--corpus", fixture("corpus.jsonl"), "--max-date", "2019-12-31", "asthma[tiab]"});
  EXPECT_EQ(bounded.out, "1\n2\n");
}

TEST(Cli, IndexSnapshotIsSearchable) {
  const fs::path snap = fs::temp_directory_path() / "boolsearch_cli_index.cbor";
  ASSERT_EQ(cli({"index", "--corpus", fixture("corpus.jsonl"), "--out", snap.string()}).exit_code, 0);
  EXPECT_EQ(cli({"search", "--index", snap.string(), "stroke[ti]"}).out, "9\n10\n");
  fs::remove(snap);
}

TEST(Cli, ValidateReportsVerdicts) {
  const auto r = cli({"validate", "--corpus", fixture("corpus.jsonl"), "--output", "<answer>zzzz[tiab]</answer>"});
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["format"]["ok"], true);
  EXPECT_EQ(j["validity"]["reason"], "zero_results");
  EXPECT_EQ(r.exit_code, 1);
}

TEST(Cli, EvalScriptedFixture) {
  const fs::path report = fs::temp_directory_path() / "boolsearch_cli_report.json";
  const auto r = cli({"eval", "--corpus", fixture("corpus.jsonl"), "--topics", fixture("topics.jsonl"),
                      "--generator", "scripted", "--script", fixture("harness_script.json"), "--report",
                      report.string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("0.6003"), std::string::npos);
  std::ifstream in(report);
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["topics"].size(), 5u);
  EXPECT_NEAR(j["summary"]["mean_regenerations"].get<double>(), 3.6, 1e-12);
  fs::remove(report);
}

TEST(Cli, EntrezFromCassette) {
  auto r = cli({"entrez", "count", "--cassette", fixture("cassette.json"), "asthma[mh]"});
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out, "3\n");
  r = cli({"entrez", "ids", "--cassette", fixture("cassette.json"), "asthma[mh]"});
  EXPECT_EQ(r.out, "38000003\n38000001\n38000002\n");
  r = cli({"entrez", "count", "--cassette", fixture("cassette.json"), "unrecorded"});
  EXPECT_EQ(r.exit_code, 3);
}

TEST(Cli, IngestAndSplit) {
  const fs::path dir = fs::temp_directory_path() / "boolsearch_cli_dataset";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto r = cli({"ingest", "--input", fixture("pmc"), "--out", (dir / "topics.jsonl").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  std::ifstream topics(dir / "topics.jsonl");
  std::string line;
  std::getline(topics, line);
  EXPECT_EQ(nlohmann::json::parse(line)["gold"], nlohmann::json({111, 222, 333}));

  r = cli({"split", "--topics", fixture("split50.jsonl"), "--out-dir", (dir / "split").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  std::ifstream manifest(dir / "split" / "manifest.json");
  const auto m = nlohmann::json::parse(manifest);
  std::ifstream expected_in(kFixtures / "split50_expected.json");
  const auto expected = nlohmann::json::parse(expected_in);
  EXPECT_EQ(m["pubtemp"], expected["pubtemp"]);
  fs::remove_all(dir);
}
