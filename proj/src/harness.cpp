#include "boolsearch/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "boolsearch/corpus.hpp"
#include "boolsearch/errors.hpp"

namespace boolsearch {

namespace {

SystemClock& system_clock() {
  static SystemClock clock;
  return clock;
}

SearchScope scope_for(const Topic& topic, const RunConfig& cfg) {
  SearchScope scope;
  if (cfg.date_bounded) scope.max_date = topic.publication_date;
  return scope;
}

// Executor calls for one topic, with transport failures and the remote deadline turned
// into TopicAborted.
class TopicExecution {
 public:
  TopicExecution(const Topic& topic, Executor& executor, const RunConfig& cfg, Clock& clock)
      : topic_(topic), executor_(executor), scope_(scope_for(topic, cfg)), clock_(clock) {
    if (executor.remote()) deadline_ = clock.now() + cfg.topic_timeout;
  }

 private:
  template <typename F>
  auto guarded(F&& f) {
    if (deadline_ && clock_.now() > *deadline_) {
      throw TopicAborted(topic_.topic_id, "topic timeout exceeded");
    }
    try {
      return f();
    } catch (const TransportError& e) {
      throw TopicAborted(topic_.topic_id, std::string("executor transport error: ") + e.what());
    }
  }

 public:
  std::size_t count(const std::string& query) {
    return guarded([&] { return executor_.count(query, scope_); });
  }

  Retrieval retrieve(const std::string& query) {
    return guarded([&] { return executor_.retrieve(query, scope_); });
  }

 private:
  const Topic& topic_;
  Executor& executor_;
  SearchScope scope_;
  Clock& clock_;
  std::optional<Clock::duration> deadline_;
};

std::optional<std::string> generate_with_retry(Generator& generator,
                                               const GenerationRequest& request,
                                               const RunConfig& cfg, Clock& clock) {
  for (int retry = 0;; ++retry) {
    try {
      return generator.generate(request);
    } catch (const TransportError& e) {
      if (!e.retryable() || retry >= cfg.generator_retries) return std::nullopt;
      clock.sleep_for(cfg.generator_backoff * (1 << std::min(retry, 10)));
    }
  }
}

}  // namespace

void RunConfig::validate() const {
  if (max_attempts < 1) throw ContractError("max_attempts must be at least 1");
  if (parallelism < 1) throw ContractError("parallelism must be at least 1");
  if (generator_retries < 0) throw ContractError("generator_retries must be non-negative");
  reward.validate();
}

TopicEval run_topic(const Topic& topic, Generator& generator, Executor& executor,
                    const RunConfig& cfg, Clock& clock) {
  cfg.validate();
  if (topic.gold_pmids.empty()) throw ContractError("topic " + topic.topic_id + " has no gold set");
  TopicExecution exec(topic, executor, cfg, clock);
  const OutputMode mode = output_mode(cfg.prompt_kind);

  TopicEval eval;
  eval.topic_id = topic.topic_id;
  for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
    const auto raw = generate_with_retry(
        generator, {topic.topic_id, topic.title, cfg.prompt_kind, attempt}, cfg, clock);
    if (!raw) {
      eval.attempt_failures.push_back("generator_error");
      continue;
    }
    const FormatVerdict format = check_format(*raw, mode);
    if (!format.ok) {
      eval.attempt_failures.push_back("format:" + std::string(to_string(format.violations.front())));
      continue;
    }
    const std::string& query = *format.extracted_query;
    const ValidityVerdict validity =
        check_validity(query, [&](const std::string& q) { return exec.count(q); }, cfg.reward.limits);
    if (!validity.ok) {
      eval.attempt_failures.push_back("validity:" + std::string(to_string(validity.reason)));
      continue;
    }
    Retrieval retrieval;
    try {
      retrieval = exec.retrieve(query);
    } catch (const QueryRejected&) {
      eval.attempt_failures.push_back("validity:rejected");
      continue;
    }
    eval.query = query;
    eval.outcome = score(retrieval.ids, topic.gold_pmids);
    eval.f3 = f_beta(eval.outcome.recall, eval.outcome.precision, 3.0);
    eval.regenerations = attempt;
    eval.success = true;
    eval.truncated = retrieval.truncated;
    return eval;
  }
  eval.regenerations = cfg.max_attempts;
  eval.outcome = RetrievalOutcome::none();
  return eval;
}

TopicEval run_topic(const Topic& topic, Generator& generator, Executor& executor,
                    const RunConfig& cfg) {
  return run_topic(topic, generator, executor, cfg, system_clock());
}

EvalReport run_eval(const std::vector<Topic>& topics, Generator& generator, Executor& executor,
                    const RunConfig& cfg, Clock& clock) {
  cfg.validate();
  if (topics.empty()) throw ContractError("no topics to evaluate");

  std::vector<std::optional<TopicEval>> results(topics.size());
  std::vector<std::optional<std::string>> errors(topics.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;

  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < topics.size();) {
      try {
        results[i] = run_topic(topics[i], generator, executor, cfg, clock);
      } catch (const TopicAborted& e) {
        errors[i] = e.what();
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        next = topics.size();
      }
    }
  };
  const std::size_t workers = std::min(cfg.parallelism, topics.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  EvalReport report;
  for (std::size_t i = 0; i < topics.size(); ++i) {
    if (results[i]) {
      report.rows.push_back(std::move(*results[i]));
    } else {
      report.aborted.push_back({topics[i].topic_id, errors[i].value_or("aborted")});
    }
  }
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const TopicEval& a, const TopicEval& b) { return a.topic_id < b.topic_id; });
  std::stable_sort(report.aborted.begin(), report.aborted.end(),
                   [](const AbortedTopic& a, const AbortedTopic& b) { return a.topic_id < b.topic_id; });
  if (!report.rows.empty()) report.summary = summarize(report.rows, cfg.summary);
  report.config_hash = fnv1a_hex(config_json(cfg).dump());
  report.corpus = executor.identity();
  report.generator = generator.identity();
  report.seed = cfg.seed;
  return report;
}

EvalReport run_eval(const std::vector<Topic>& topics, Generator& generator, Executor& executor,
                    const RunConfig& cfg) {
  return run_eval(topics, generator, executor, cfg, system_clock());
}

nlohmann::json config_json(const RunConfig& cfg) {
  return nlohmann::json{{"max_attempts", cfg.max_attempts},
                        {"prompt_kind", std::string(to_string(cfg.prompt_kind))},
                        {"reward", cfg.reward},
                        {"seed", cfg.seed},
                        {"date_bounded", cfg.date_bounded},
                        {"generator_retries", cfg.generator_retries},
                        {"strict_thresholds", cfg.summary.strict_thresholds},
                        {"include_failed", cfg.summary.include_failed}};
}

void to_json(nlohmann::json& j, const EvalReport& r) {
  j = nlohmann::json{{"config_hash", r.config_hash},
                     {"corpus", r.corpus},
                     {"generator", r.generator},
                     {"seed", r.seed},
                     {"topics", r.rows}};
  j["summary"] = r.summary ? nlohmann::json(*r.summary) : nlohmann::json();
  auto& aborted = j["aborted"] = nlohmann::json::array();
  for (const auto& a : r.aborted) aborted.push_back({{"topic_id", a.topic_id}, {"error", a.error}});
}

std::string report_text(const EvalReport& report) {
  return nlohmann::json(report).dump(2) + "\n";
}

ScoredOutput score_output(const Topic& topic, const std::string& raw_output, Executor& executor,
                          const RunConfig& cfg) {
  ScoredOutput out;
  out.format = check_format(raw_output, output_mode(cfg.prompt_kind));
  const SearchScope scope = scope_for(topic, cfg);
  if (out.format.extracted_query) {
    out.validity = check_validity(
        *out.format.extracted_query,
        [&](const std::string& q) { return executor.count(q, scope); }, cfg.reward.limits);
  }
  if (out.validity.ok) {
    try {
      out.outcome = score(executor.retrieve(*out.format.extracted_query, scope).ids, topic.gold_pmids);
    } catch (const QueryRejected& e) {
      out.validity.ok = false;
      out.validity.reason = e.reason() == QueryRejected::Reason::too_broad
                                ? ValidityReason::over_limit
                                : ValidityReason::parse_failure;
    }
  }
  out.reward = total_reward(out.format, out.validity, out.outcome, cfg.reward);
  return out;
}

BatchResult reward_batch(const Topic& topic, const std::vector<std::string>& raw_outputs,
                         Executor& executor, const RunConfig& cfg) {
  cfg.validate();
  if (raw_outputs.size() < 2) throw ContractError("a reward batch needs at least two outputs");
  BatchResult batch;
  std::vector<double> totals;
  for (const auto& raw : raw_outputs) {
    batch.outputs.push_back(score_output(topic, raw, executor, cfg));
    totals.push_back(batch.outputs.back().reward.r_total);
  }
  batch.advantages = group_advantages(totals);
  return batch;
}

void to_json(nlohmann::json& j, const ScoredOutput& s) {
  j = nlohmann::json{{"format", s.format}, {"validity", s.validity}, {"reward", s.reward}};
  j["outcome"] = s.outcome ? nlohmann::json(*s.outcome) : nlohmann::json();
}

}  // namespace boolsearch
