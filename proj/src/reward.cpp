#include "boolsearch/reward.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

#include "boolsearch/errors.hpp"
#include "boolsearch/metrics.hpp"

namespace boolsearch {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
    throw ContractError("config key '" + std::string(key) + "' expects a real number, got '" +
                        std::string(value) + "'");
  }
  return out;
}

std::size_t parse_count(std::string_view key, std::string_view value) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ContractError("config key '" + std::string(key) + "' expects a non-negative integer, got '" +
                        std::string(value) + "'");
  }
  return out;
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ContractError(std::string(name) + " must lie in [0, 1]");
  }
}

// Shared penalty cases. Returns nullopt when the variant's closed form applies.
std::optional<double> penalty(const RetrievalOutcome& o, const RewardConfig& cfg) {
  check_unit(o.recall, "recall");
  check_unit(o.precision, "precision");
  if (o.n_retrieved == 0) return cfg.empty_penalty;
  if (o.recall == 0.0 && o.precision == 0.0) return cfg.zero_relevant_penalty;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(RewardKind kind) noexcept {
  switch (kind) {
    case RewardKind::full: return "full";
    case RewardKind::no_log_scaling: return "no_log_scaling";
    case RewardKind::no_recall_dependency: return "no_recall_dependency";
    case RewardKind::no_precision: return "no_precision";
    case RewardKind::f3_based: return "f3_based";
  }
  return "?";
}

RewardKind reward_kind_from_string(std::string_view name) {
  for (RewardKind k : {RewardKind::full, RewardKind::no_log_scaling,
                       RewardKind::no_recall_dependency, RewardKind::no_precision,
                       RewardKind::f3_based}) {
    if (to_string(k) == name) return k;
  }
  throw ContractError("unknown reward variant '" + std::string(name) + "'");
}

void RewardVariant::validate() const {
  if (!(beta > 0.0)) throw ContractError("beta must be positive");
}

void RewardConfig::validate() const {
  if (!(M > 0.0)) throw ContractError("M must be positive");
  if (!(s > 0.0)) throw ContractError("s must be positive");
  if (!(alpha >= 0.0)) throw ContractError("alpha must be non-negative");
  if (!(empty_penalty <= zero_relevant_penalty)) {
    throw ContractError("empty_penalty must not exceed zero_relevant_penalty");
  }
  if (!(zero_relevant_penalty <= 0.0)) throw ContractError("zero_relevant_penalty must be <= 0");
  limits.validate();
  variant.validate();
}

void RewardConfig::set(std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "M") M = parse_real(key, value);
  else if (key == "s") s = parse_real(key, value);
  else if (key == "alpha") alpha = parse_real(key, value);
  else if (key == "empty_penalty") empty_penalty = parse_real(key, value);
  else if (key == "zero_relevant_penalty") zero_relevant_penalty = parse_real(key, value);
  else if (key == "format_reward_magnitude") format_reward_magnitude = parse_real(key, value);
  else if (key == "validity_reward_magnitude") validity_reward_magnitude = parse_real(key, value);
  else if (key == "invalid_retrieval_reward") invalid_retrieval_reward = parse_real(key, value);
  else if (key == "max_docs") limits.max_docs = parse_count(key, value);
  else if (key == "min_docs") limits.min_docs = parse_count(key, value);
  else if (key == "variant") variant.kind = reward_kind_from_string(value);
  else if (key == "beta") variant.beta = parse_real(key, value);
  else throw ContractError("unknown config key '" + std::string(key) + "'");
}

std::map<std::string, std::string> RewardConfig::to_map() const {
  std::map<std::string, std::string> m{
      {"M", format_real(M)},
      {"s", format_real(s)},
      {"alpha", format_real(alpha)},
      {"empty_penalty", format_real(empty_penalty)},
      {"zero_relevant_penalty", format_real(zero_relevant_penalty)},
      {"format_reward_magnitude", format_real(format_reward_magnitude)},
      {"validity_reward_magnitude", format_real(validity_reward_magnitude)},
      {"max_docs", std::to_string(limits.max_docs)},
      {"min_docs", std::to_string(limits.min_docs)},
      {"variant", std::string(to_string(variant.kind))},
      {"beta", format_real(variant.beta)},
  };
  if (invalid_retrieval_reward) {
    m["invalid_retrieval_reward"] = format_real(*invalid_retrieval_reward);
  }
  return m;
}

RewardConfig read_reward_config(std::istream& in, RewardConfig cfg) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw DataError("line " + std::to_string(number) + ": expected 'key = value'", number);
    }
    try {
      cfg.set(trim(view.substr(0, eq)), view.substr(eq + 1));
    } catch (const ContractError& e) {
      throw DataError("line " + std::to_string(number) + ": " + e.what(), number);
    }
  }
  try {
    cfg.validate();
  } catch (const ContractError& e) {
    throw DataError(std::string("invalid reward config: ") + e.what());
  }
  return cfg;
}

RewardConfig load_reward_config(const std::string& path, RewardConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  return read_reward_config(in, std::move(base));
}

void write_reward_config(std::ostream& out, const RewardConfig& cfg) {
  for (const auto& [key, value] : cfg.to_map()) out << key << " = " << value << '\n';
}

double precision_term(double recall, double precision, const RewardConfig& cfg) {
  if (precision == 0.0) return 0.0;
  return cfg.M * std::pow(recall, cfg.alpha) * std::log1p(cfg.s * precision) /
         std::log1p(cfg.s);
}

double recall_weighted_f(double recall, double precision, const RewardConfig& cfg) {
  return cfg.M * recall + precision_term(recall, precision, cfg);
}

double retrieval_reward(const RetrievalOutcome& outcome, const RewardConfig& cfg) {
  if (const auto p = penalty(outcome, cfg)) return *p;
  return recall_weighted_f(outcome.recall, outcome.precision, cfg);
}

double variant_reward(const RewardVariant& variant, const RetrievalOutcome& outcome,
                      const RewardConfig& cfg) {
  variant.validate();
  if (const auto p = penalty(outcome, cfg)) return *p;
  const double r = outcome.recall;
  const double p = outcome.precision;
  switch (variant.kind) {
    case RewardKind::full: return recall_weighted_f(r, p, cfg);
    case RewardKind::no_log_scaling: return cfg.M * r + cfg.M * std::pow(r, cfg.alpha) * p;
    case RewardKind::no_recall_dependency: return cfg.M * r + cfg.M * p;
    case RewardKind::no_precision: return cfg.M * r;
    case RewardKind::f3_based: return cfg.M * f_beta(r, p, variant.beta);
  }
  throw ContractError("unknown reward variant");
}

RewardBreakdown total_reward(const FormatVerdict& format, const ValidityVerdict& validity,
                             const std::optional<RetrievalOutcome>& outcome,
                             const RewardConfig& cfg) {
  if (outcome.has_value() != validity.ok) {
    throw ContractError("a retrieval outcome must be given exactly when the query is valid");
  }
  RewardBreakdown b;
  b.r_format = format.ok ? cfg.format_reward_magnitude : -cfg.format_reward_magnitude;
  b.r_validity = validity.ok ? cfg.validity_reward_magnitude : -cfg.validity_reward_magnitude;
  b.r_retrieval = outcome ? variant_reward(cfg.variant, *outcome, cfg) : cfg.invalid_retrieval();
  b.r_total = b.r_format + b.r_validity + b.r_retrieval;
  return b;
}

std::vector<double> group_advantages(const std::vector<double>& rewards) {
  if (rewards.size() < 2) throw ContractError("group advantages need at least two rewards");
  const auto g = static_cast<double>(rewards.size());
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / g;
  double ss = 0.0;
  for (double r : rewards) ss += (r - mean) * (r - mean);
  const double sd = std::sqrt(ss / g);
  std::vector<double> out(rewards.size(), 0.0);
  if (sd < 1e-8) return out;
  for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) / sd;
  return out;
}

void to_json(nlohmann::json& j, const RewardBreakdown& b) {
  j = nlohmann::json{{"r_format", b.r_format},
                     {"r_validity", b.r_validity},
                     {"r_retrieval", b.r_retrieval},
                     {"r_total", b.r_total}};
}

void to_json(nlohmann::json& j, const RewardConfig& cfg) {
  j = nlohmann::json{{"M", cfg.M},
                     {"s", cfg.s},
                     {"alpha", cfg.alpha},
                     {"empty_penalty", cfg.empty_penalty},
                     {"zero_relevant_penalty", cfg.zero_relevant_penalty},
                     {"format_reward_magnitude", cfg.format_reward_magnitude},
                     {"validity_reward_magnitude", cfg.validity_reward_magnitude},
                     {"invalid_retrieval_reward", cfg.invalid_retrieval()},
                     {"max_docs", cfg.limits.max_docs},
                     {"min_docs", cfg.limits.min_docs},
                     {"variant", std::string(to_string(cfg.variant.kind))},
                     {"beta", cfg.variant.beta}};
}

}  // namespace boolsearch
