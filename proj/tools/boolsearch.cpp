#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "boolsearch/corpus.hpp"
#include "boolsearch/dataset.hpp"
#include "boolsearch/entrez.hpp"
#include "boolsearch/errors.hpp"
#include "boolsearch/executor.hpp"
#include "boolsearch/generator.hpp"
#include "boolsearch/harness.hpp"
#include "boolsearch/index.hpp"
#include "boolsearch/query.hpp"
#include "boolsearch/reward.hpp"
#include "boolsearch/validity.hpp"

namespace bs = boolsearch;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kDomain = 1, kUsage = 2, kInfra = 3 };

std::string read_stream(std::istream& in) {
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_stream(in);
}

// Positional text, or stdin when absent or "-".
std::string text_or_stdin(const std::string& value) {
  if (!value.empty() && value != "-") return value;
  std::string text = read_stream(std::cin);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

std::optional<bs::Date> optional_date(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return bs::parse_date(text);
}

struct BackendOptions {
  std::string corpus;
  std::string index;
  bool live = false;
  std::string cassette;
  std::string record;
  std::string base_url;
  std::size_t max_ids = 200000;
  std::size_t page_size = 10000;
  double rate = 0.0;

  void add_to(CLI::App* app) {
    auto* corpus_opt = app->add_option("--corpus", corpus, "Corpus JSON-lines file");
    auto* index_opt = app->add_option("--index", index, "Index snapshot file");
    auto* live_opt = app->add_flag("--live", live, "Query PubMed through Entrez");
    corpus_opt->excludes(index_opt)->excludes(live_opt);
    index_opt->excludes(live_opt);
    app->add_option("--cassette", cassette, "Replay Entrez responses from a cassette (implies --live)");
    app->add_option("--record", record, "Save live Entrez responses to a cassette file");
    app->add_option("--base-url", base_url, "Entrez esearch URL");
    app->add_option("--max-ids", max_ids, "Cap on ids fetched per live query");
    app->add_option("--page-size", page_size, "Ids per Entrez request");
    app->add_option("--rate", rate, "Entrez requests per second");
  }

  bool remote() const { return live || !cassette.empty(); }
};

// Owns whatever the chosen executor needs.
struct Backend {
  std::optional<bs::Corpus> corpus;
  std::optional<bs::PostingsIndex> index;
  std::unique_ptr<bs::Transport> transport;
  std::unique_ptr<bs::RecordingTransport> recorder;
  bs::SystemClock clock;
  std::unique_ptr<bs::EntrezClient> client;
  std::unique_ptr<bs::Executor> executor;
  std::string record_path;

  ~Backend() {
    if (recorder && !record_path.empty()) {
      try {
        recorder->save(record_path);
      } catch (const std::exception& e) {
        std::cerr << "warning: " << e.what() << '\n';
      }
    }
  }
};

bs::EntrezConfig entrez_config(const BackendOptions& o) {
  bs::EntrezConfig cfg = bs::EntrezConfig::from_environment();
  if (!o.base_url.empty()) cfg.base_url = o.base_url;
  cfg.max_ids = o.max_ids;
  cfg.page_size = o.page_size;
  if (o.rate > 0) cfg.rate_limit = o.rate;
  return cfg;
}

void open_entrez(const BackendOptions& o, Backend& b) {
  if (!o.cassette.empty()) {
    b.transport = std::make_unique<bs::CassetteTransport>(bs::read_cassette(o.cassette));
  } else {
    b.transport = std::make_unique<bs::HttpTransport>();
  }
  bs::Transport* transport = b.transport.get();
  if (!o.record.empty()) {
    b.recorder = std::make_unique<bs::RecordingTransport>(*transport);
    b.record_path = o.record;
    transport = b.recorder.get();
  }
  b.client = std::make_unique<bs::EntrezClient>(entrez_config(o), *transport, b.clock);
}

std::unique_ptr<Backend> open_backend(const BackendOptions& o) {
  auto b = std::make_unique<Backend>();
  if (o.remote()) {
    open_entrez(o, *b);
    b->executor = std::make_unique<bs::EntrezExecutor>(*b->client);
    return b;
  }
  std::string identity;
  if (!o.index.empty()) {
    std::ifstream in(o.index, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open index " + o.index);
    b->index = bs::load_snapshot(in);
    identity = "index:" + fs::path(o.index).filename().string();
  } else if (!o.corpus.empty()) {
    b->corpus = bs::load_corpus(o.corpus);
    b->index = bs::build_index(*b->corpus);
    identity = "corpus:" + bs::corpus_fingerprint(*b->corpus);
  } else {
    throw bs::ContractError("one of --corpus, --index, --live or --cassette is required");
  }
  b->executor = std::make_unique<bs::LocalExecutor>(*b->index, identity);
  return b;
}

// Reward keys settable from the command line; flags win over --config.
struct RewardOptions {
  std::string config_path;
  std::vector<std::pair<std::string, std::optional<std::string>>> values{
      {"M", {}},
      {"s", {}},
      {"alpha", {}},
      {"empty_penalty", {}},
      {"zero_relevant_penalty", {}},
      {"format_reward_magnitude", {}},
      {"validity_reward_magnitude", {}},
      {"invalid_retrieval_reward", {}},
      {"max_docs", {}},
      {"min_docs", {}},
      {"variant", {}},
      {"beta", {}},
  };

  void add_to(CLI::App* app) {
    app->add_option("--config", config_path, "Reward config file (key = value lines)");
    for (auto& [key, value] : values) {
      std::string names = "--" + key;
      std::string dashed = key;
      std::replace(dashed.begin(), dashed.end(), '_', '-');
      if (dashed != key) names += ",--" + dashed;
      app->add_option(names, value, "Reward setting " + key);
    }
  }

  bs::RewardConfig build() const {
    bs::RewardConfig cfg;
    if (!config_path.empty()) cfg = bs::load_reward_config(config_path);
    for (const auto& [key, value] : values) {
      if (value) cfg.set(key, *value);
    }
    cfg.validate();
    return cfg;
  }
};

const bs::Topic& find_topic(const std::vector<bs::Topic>& topics, const std::string& id) {
  for (const auto& t : topics) {
    if (t.topic_id == id) return t;
  }
  throw bs::ContractError("topic " + id + " not found");
}

void print_json(const json& j) { std::cout << j.dump() << '\n'; }

// ---- subcommands -------------------------------------------------------------------------

struct Cli {
  bool json_errors = false;
  CLI::App app{"Boolean query tooling for systematic review search"};

  // parse / fmt
  std::string query_text;

  // index
  std::string corpus_path;
  std::string snapshot_path;
  std::size_t max_wildcards = 10000;

  // search / validate / reward / eval
  BackendOptions backend;
  std::string max_date;

  // validate / reward
  std::string output_text;
  std::string output_file;
  std::string prompt_kind = "no_reasoning";
  std::optional<std::size_t> max_docs;
  std::optional<std::size_t> min_docs;

  // reward / eval
  RewardOptions reward;
  std::string topics_path;
  std::string topic_id;
  bool date_bounded = false;

  // eval
  std::string generator = "template";
  std::string script_path;
  std::string replay_path;
  std::string endpoint;
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";
  std::string prompt_dir;
  double temperature = 0.6;
  int max_attempts = 10;
  std::size_t parallelism = 1;
  std::uint64_t seed = 0;
  int topic_timeout = 120;
  bool lenient_thresholds = false;
  bool exclude_failed = false;
  std::string report_path;

  // ingest
  std::string input_dir;
  std::string out_path;
  std::string exclude_path;

  // split
  std::string out_dir;
  std::string train_end = "2021-10-30";
  std::string test_start = "2021-10-31";
  std::string pubtemp_start = "2024-11-01";
  std::size_t pubtemp_sample = 1000;

  CLI::App* parse_cmd = nullptr;
  CLI::App* fmt_cmd = nullptr;
  CLI::App* index_cmd = nullptr;
  CLI::App* search_cmd = nullptr;
  CLI::App* validate_cmd = nullptr;
  CLI::App* reward_cmd = nullptr;
  CLI::App* eval_cmd = nullptr;
  CLI::App* ingest_cmd = nullptr;
  CLI::App* split_cmd = nullptr;
  CLI::App* entrez_cmd = nullptr;
  CLI::App* entrez_count = nullptr;
  CLI::App* entrez_ids = nullptr;

  Cli() {
    app.require_subcommand(1);
    app.add_flag("--json", json_errors, "Machine-readable output and single-line JSON errors");

    parse_cmd = app.add_subcommand("parse", "Parse a query and print its AST as JSON");
    parse_cmd->add_option("query", query_text, "Query text, or - for stdin");

    fmt_cmd = app.add_subcommand("fmt", "Print the canonical form of a query");
    fmt_cmd->add_option("query", query_text, "Query text, or - for stdin");

    index_cmd = app.add_subcommand("index", "Build an index from a corpus and save a snapshot");
    index_cmd->add_option("--corpus", corpus_path, "Corpus JSON-lines file")->required();
    index_cmd->add_option("--out", snapshot_path, "Snapshot output path")->required();
    index_cmd->add_option("--max-wildcard-expansions", max_wildcards, "Per-term wildcard cap");

    search_cmd = app.add_subcommand("search", "Print the PMIDs a query retrieves");
    search_cmd->add_option("query", query_text, "Query text, or - for stdin");
    backend.add_to(search_cmd);
    search_cmd->add_option("--max-date", max_date, "Only documents dated on or before YYYY-MM-DD");

    validate_cmd = app.add_subcommand("validate", "Check the format and validity of a model output");
    validate_cmd->add_option("--output", output_text, "Raw model output, or - for stdin");
    validate_cmd->add_option("--output-file", output_file, "File holding the raw model output");
    validate_cmd->add_option("--prompt-kind", prompt_kind, "no_reasoning|free_reasoning|conceptual|objective");
    validate_cmd->add_option("--max-docs,--max_docs", max_docs, "Largest valid result count");
    validate_cmd->add_option("--min-docs,--min_docs", min_docs, "Smallest valid result count");
    validate_cmd->add_option("--max-date", max_date, "Only documents dated on or before YYYY-MM-DD");
    backend.add_to(validate_cmd);

    reward_cmd = app.add_subcommand("reward", "Score one output for a topic");
    auto* q = reward_cmd->add_option("--query", query_text, "Bare query; wrapped in answer tags");
    auto* o = reward_cmd->add_option("--output", output_text, "Raw model output");
    auto* f = reward_cmd->add_option("--output-file", output_file, "File holding the raw output");
    q->excludes(o)->excludes(f);
    o->excludes(f);
    reward_cmd->add_option("--topics", topics_path, "Topics JSON-lines file")->required();
    reward_cmd->add_option("--topic", topic_id, "Topic id")->required();
    reward_cmd->add_option("--prompt-kind", prompt_kind, "Prompt kind fixing the output format");
    reward_cmd->add_flag("--date-bounded", date_bounded, "Restrict to documents dated up to the topic");
    reward.add_to(reward_cmd);
    backend.add_to(reward_cmd);

    eval_cmd = app.add_subcommand("eval", "Run the evaluation protocol over a topic set");
    eval_cmd->add_option("--topics", topics_path, "Topics JSON-lines file")->required();
    eval_cmd->add_option("--generator", generator, "template|scripted|replay|remote")
        ->check(CLI::IsMember({"template", "scripted", "replay", "remote"}));
    eval_cmd->add_option("--script", script_path, "Scripted outputs {topic: [outputs]}");
    eval_cmd->add_option("--replay", replay_path, "Replay JSON lines {topic, attempt, output}");
    eval_cmd->add_option("--endpoint", endpoint, "Chat-completions URL for --generator remote");
    eval_cmd->add_option("--model", model, "Model name for --generator remote");
    eval_cmd->add_option("--api-key-env", api_key_env, "Environment variable holding the API key");
    eval_cmd->add_option("--prompt-dir", prompt_dir, "Directory of prompt JSON files");
    eval_cmd->add_option("--temperature", temperature, "Sampling temperature for --generator remote");
    eval_cmd->add_option("--prompt-kind,--prompt_kind", prompt_kind, "Prompt kind");
    eval_cmd->add_option("--max-attempts,--max_attempts", max_attempts, "Attempt cap per topic");
    eval_cmd->add_option("--parallelism", parallelism, "Topics evaluated concurrently");
    eval_cmd->add_option("--seed", seed, "Seed for deterministic generators");
    eval_cmd->add_option("--topic-timeout", topic_timeout, "Seconds per topic with a remote executor");
    eval_cmd->add_flag("--date-bounded", date_bounded, "Restrict each topic to documents dated up to it");
    eval_cmd->add_flag("--lenient-thresholds", lenient_thresholds, "Recall thresholds use >=");
    eval_cmd->add_flag("--exclude-failed", exclude_failed, "Leave failed topics out of retrieval means");
    eval_cmd->add_option("--report", report_path, "Write the JSON report here");
    reward.add_to(eval_cmd);
    backend.add_to(eval_cmd);

    ingest_cmd = app.add_subcommand("ingest", "Extract topics from a directory of PMC XML files");
    ingest_cmd->add_option("--input", input_dir, "Directory of .xml/.nxml files")->required();
    ingest_cmd->add_option("--out", out_path, "Topics JSON-lines output")->required();
    ingest_cmd->add_option("--exclude", exclude_path, "File of topic ids to drop");

    split_cmd = app.add_subcommand("split", "Temporal train/test/pubtemp split");
    split_cmd->add_option("--topics", topics_path, "Topics JSON-lines file")->required();
    split_cmd->add_option("--out-dir", out_dir, "Directory for train/test/pubtemp files")->required();
    split_cmd->add_option("--train-end,--train_end", train_end, "Last training date");
    split_cmd->add_option("--test-start,--test_start", test_start, "First test date");
    split_cmd->add_option("--pubtemp-start,--pubtemp_start", pubtemp_start, "First pubtemp date");
    split_cmd->add_option("--pubtemp-sample,--pubtemp_sample", pubtemp_sample, "Pubtemp sample size");
    split_cmd->add_option("--seed", seed, "Sampling seed");

    entrez_cmd = app.add_subcommand("entrez", "Raw esearch calls");
    entrez_cmd->require_subcommand(1);
    entrez_count = entrez_cmd->add_subcommand("count", "Print the result count");
    entrez_ids = entrez_cmd->add_subcommand("ids", "Print the result ids");
    for (auto* sub : {entrez_count, entrez_ids}) {
      sub->add_option("query", query_text, "Query text, or - for stdin");
      sub->add_option("--max-date", max_date, "Date cutoff YYYY-MM-DD");
      sub->add_option("--cassette", backend.cassette, "Replay responses from a cassette");
      sub->add_option("--record", backend.record, "Save responses to a cassette file");
      sub->add_option("--base-url", backend.base_url, "Entrez esearch URL");
      sub->add_option("--max-ids", backend.max_ids, "Cap on ids fetched");
      sub->add_option("--page-size", backend.page_size, "Ids per request");
      sub->add_option("--rate", backend.rate, "Requests per second");
    }
  }

  int run() {
    if (parse_cmd->parsed()) return cmd_parse();
    if (fmt_cmd->parsed()) return cmd_fmt();
    if (index_cmd->parsed()) return cmd_index();
    if (search_cmd->parsed()) return cmd_search();
    if (validate_cmd->parsed()) return cmd_validate();
    if (reward_cmd->parsed()) return cmd_reward();
    if (eval_cmd->parsed()) return cmd_eval();
    if (ingest_cmd->parsed()) return cmd_ingest();
    if (split_cmd->parsed()) return cmd_split();
    if (entrez_cmd->parsed()) return cmd_entrez();
    return kUsage;
  }

  int cmd_parse() {
    const bs::ParseResult result = bs::parse(text_or_stdin(query_text));
    json out{{"ok", result.ok()}, {"diagnostics", result.diagnostics}};
    out["ast"] = result.ast ? json(*result.ast) : json();
    if (result.ast) {
      const auto c = bs::complexity(*result.ast);
      out["complexity"] = {{"nodes", c.node_count}, {"depth", c.depth}, {"terms", c.term_count}};
    }
    std::cout << out.dump(json_errors ? -1 : 2) << '\n';
    return result.ok() ? kOk : kDomain;
  }

  int cmd_fmt() {
    const bs::ParseResult result = bs::parse(text_or_stdin(query_text));
    if (!result.ok()) {
      std::cerr << json{{"diagnostics", result.diagnostics}}.dump() << '\n';
      return kDomain;
    }
    std::cout << bs::serialize(*result.ast) << '\n';
    return kOk;
  }

  int cmd_index() {
    const bs::Corpus corpus = bs::load_corpus(corpus_path);
    bs::IndexOptions options;
    options.max_wildcard_expansions = max_wildcards;
    const bs::PostingsIndex index = bs::build_index(corpus, options);
    std::ofstream out(snapshot_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + snapshot_path);
    bs::save_snapshot(index, out);
    out.close();
    if (!out) throw std::runtime_error("failed writing " + snapshot_path);
    print_json({{"documents", corpus.size()},
                {"fingerprint", bs::corpus_fingerprint(corpus)},
                {"snapshot", snapshot_path}});
    return kOk;
  }

  int cmd_search() {
    const std::string query = text_or_stdin(query_text);
    auto b = open_backend(backend);
    const bs::Retrieval r = b->executor->retrieve(query, {optional_date(max_date)});
    if (json_errors) {
      print_json({{"count", r.count}, {"ids", r.ids.ids()}, {"truncated", r.truncated}});
    } else {
      for (bs::Pmid id : r.ids) std::cout << id << '\n';
      if (r.truncated) std::cerr << "truncated: " << r.count << " matches in total\n";
    }
    return kOk;
  }

  std::string raw_output() {
    if (!output_file.empty()) return read_file(output_file);
    if (output_text.empty()) throw bs::ContractError("--output or --output-file is required");
    return text_or_stdin(output_text);
  }

  int cmd_validate() {
    const std::string raw = raw_output();
    const bs::PromptKind kind = bs::prompt_kind_from_string(prompt_kind);
    const bs::FormatVerdict format = bs::check_format(raw, bs::output_mode(kind));
    bs::ExecutionLimits limits;
    if (max_docs) limits.max_docs = *max_docs;
    if (min_docs) limits.min_docs = *min_docs;
    limits.validate();
    json out{{"format", format}};
    bool ok = format.ok;
    if (format.extracted_query) {
      auto b = open_backend(backend);
      const bs::SearchScope scope{optional_date(max_date)};
      const bs::ValidityVerdict validity = bs::check_validity(
          *format.extracted_query,
          [&](const std::string& query) { return b->executor->count(query, scope); }, limits);
      out["validity"] = validity;
      ok = ok && validity.ok;
    } else {
      out["validity"] = nullptr;
    }
    std::cout << out.dump(json_errors ? -1 : 2) << '\n';
    return ok ? kOk : kDomain;
  }

  bs::RunConfig run_config() {
    bs::RunConfig cfg;
    cfg.reward = reward.build();
    cfg.prompt_kind = bs::prompt_kind_from_string(prompt_kind);
    cfg.max_attempts = max_attempts;
    cfg.parallelism = parallelism;
    cfg.seed = seed;
    cfg.date_bounded = date_bounded;
    cfg.topic_timeout = std::chrono::seconds(topic_timeout);
    cfg.summary.strict_thresholds = !lenient_thresholds;
    cfg.summary.include_failed = !exclude_failed;
    cfg.validate();
    return cfg;
  }

  int cmd_reward() {
    const bs::RunConfig cfg = run_config();
    std::string raw;
    if (!query_text.empty()) {
      const std::string query = text_or_stdin(query_text);
      raw = bs::output_mode(cfg.prompt_kind) == bs::OutputMode::reasoning
                ? "<think></think><answer>" + query + "</answer>"
                : "<answer>" + query + "</answer>";
    } else {
      raw = raw_output();
    }
    const auto topics = bs::load_topics(topics_path);
    const bs::Topic& topic = find_topic(topics, topic_id);
    auto b = open_backend(backend);
    const bs::ScoredOutput scored = bs::score_output(topic, raw, *b->executor, cfg);
    std::cout << json(scored).dump(json_errors ? -1 : 2) << '\n';
    return scored.format.ok && scored.validity.ok ? kOk : kDomain;
  }

  std::unique_ptr<bs::Generator> make_generator() {
    if (generator == "template") return std::make_unique<bs::TemplateGenerator>(seed);
    if (generator == "scripted") {
      if (script_path.empty()) throw bs::ContractError("--generator scripted needs --script");
      return std::make_unique<bs::ScriptedGenerator>(bs::ScriptedGenerator::load(script_path));
    }
    if (generator == "replay") {
      if (replay_path.empty()) throw bs::ContractError("--generator replay needs --replay");
      return std::make_unique<bs::ReplayGenerator>(bs::ReplayGenerator::load(replay_path));
    }
    if (endpoint.empty() || model.empty()) {
      throw bs::ContractError("--generator remote needs --endpoint and --model");
    }
    bs::RemoteGeneratorConfig rc;
    rc.endpoint = endpoint;
    rc.model = model;
    rc.api_key_env = api_key_env;
    rc.temperature = temperature;
    if (!prompt_dir.empty()) rc.prompt_dir = prompt_dir;
    return std::make_unique<bs::RemoteGenerator>(rc, bs::http_post());
  }

  int cmd_eval() {
    const bs::RunConfig cfg = run_config();
    const auto topics = bs::load_topics(topics_path);
    auto gen = make_generator();
    auto b = open_backend(backend);
    const bs::EvalReport report = bs::run_eval(topics, *gen, *b->executor, cfg);
    const std::string text = bs::report_text(report);
    if (!report_path.empty()) {
      std::ofstream out(report_path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + report_path);
      out << text;
    }
    if (json_errors) {
      std::cout << text;
    } else {
      if (report.summary) {
        std::cout << bs::format_summary_table(*report.summary, std::string(to_string(cfg.prompt_kind)));
      }
      for (const auto& a : report.aborted) {
        std::cout << "aborted " << a.topic_id << ": " << a.error << '\n';
      }
    }
    return report.aborted.empty() ? kOk : kInfra;
  }

  int cmd_ingest() {
    bs::IngestResult result = bs::ingest_directory(input_dir);
    json out = result.report;
    if (!exclude_path.empty()) {
      std::ifstream in(exclude_path);
      if (!in) throw std::runtime_error("cannot open " + exclude_path);
      auto filtered = bs::exclude_overlaps(result.topics, bs::read_id_list(in));
      out["excluded"] = filtered.removed;
      result.topics = std::move(filtered.kept);
    }
    bs::store_topics(result.topics, out_path);
    out["written"] = result.topics.size();
    std::cout << out.dump(json_errors ? -1 : 2) << '\n';
    return kOk;
  }

  int cmd_split() {
    bs::SplitSpec spec;
    spec.train_end = bs::parse_date(train_end);
    spec.test_start = bs::parse_date(test_start);
    spec.pubtemp_start = bs::parse_date(pubtemp_start);
    spec.pubtemp_sample = pubtemp_sample;
    spec.seed = seed;
    const auto topics = bs::load_topics(topics_path);
    const bs::Split split = bs::temporal_split(topics, spec);
    fs::create_directories(out_dir);
    json manifest;
    for (const auto& [name, part] : {std::pair{"train", &split.train}, std::pair{"test", &split.test},
                                     std::pair{"pubtemp", &split.pubtemp}}) {
      bs::store_topics(*part, fs::path(out_dir) / (std::string(name) + ".jsonl"));
      auto& ids = manifest[name] = json::array();
      for (const auto& t : *part) ids.push_back(t.topic_id);
    }
    manifest["seed"] = seed;
    std::ofstream(fs::path(out_dir) / "manifest.json") << manifest.dump(2) << '\n';
    std::cout << json{{"train", split.train.size()},
                      {"test", split.test.size()},
                      {"pubtemp", split.pubtemp.size()}}
                     .dump()
              << '\n';
    return kOk;
  }

  int cmd_entrez() {
    const std::string query = text_or_stdin(query_text);
    Backend b;
    open_entrez(backend, b);
    const auto cutoff = optional_date(max_date);
    if (entrez_count->parsed()) {
      const std::size_t n = b.client->esearch_count(query, cutoff);
      if (json_errors) {
        print_json({{"count", n}});
      } else {
        std::cout << n << '\n';
      }
      return kOk;
    }
    const bs::IdResult ids = b.client->esearch_ids(query, cutoff);
    if (json_errors) {
      print_json({{"count", ids.count}, {"ids", ids.ids}, {"truncated", ids.truncated}});
    } else {
      for (bs::Pmid id : ids.ids) std::cout << id << '\n';
      if (ids.truncated) std::cerr << "truncated: " << ids.count << " matches in total\n";
    }
    return kOk;
  }
};

int report_error(bool as_json, const std::string& kind, const std::string& message, int code,
                 const bs::DataError* data = nullptr) {
  if (as_json) {
    json j{{"error", kind}, {"message", message}, {"exit_code", code}};
    if (data && data->line() > 0) j["line"] = data->line();
    if (data && data->column() > 0) j["column"] = data->column();
    std::cerr << j.dump() << '\n';
  } else {
    std::cerr << "error: " << message << '\n';
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  Cli cli;
  try {
    cli.app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return cli.app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return cli.app.exit(e);
  } catch (const CLI::ParseError& e) {
    const bool as_json = std::find(argv + 1, argv + argc, std::string("--json")) != argv + argc;
    return report_error(as_json, "usage", e.what(), kUsage);
  }

  const bool j = cli.json_errors;
  try {
    return cli.run();
  } catch (const bs::ContractError& e) {
    return report_error(j, "usage", e.what(), kUsage);
  } catch (const bs::QueryRejected& e) {
    return report_error(j, "query_rejected", e.what(), kDomain);
  } catch (const bs::DataError& e) {
    return report_error(j, "data", e.what(), kDomain, &e);
  } catch (const bs::TransportError& e) {
    return report_error(j, "transport", e.what(), kInfra);
  } catch (const bs::TopicAborted& e) {
    return report_error(j, "transport", e.what(), kInfra);
  } catch (const std::exception& e) {
    return report_error(j, "io", e.what(), kInfra);
  }
}
