#include "boolsearch/generator.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "boolsearch/corpus.hpp"
#include "boolsearch/dataset.hpp"
#include "boolsearch/errors.hpp"
#include "boolsearch/text.hpp"

#ifndef BOOLSEARCH_DATA_DIR
#define BOOLSEARCH_DATA_DIR "data"
#endif

namespace boolsearch {

namespace {

constexpr PromptKind kKinds[] = {PromptKind::no_reasoning, PromptKind::free_reasoning,
                                 PromptKind::conceptual, PromptKind::objective};

const std::set<std::string, std::less<>>& stopwords() {
  static const std::set<std::string, std::less<>> words{
      "a",       "about",  "after",   "against", "among",  "an",     "and",     "are",
      "as",      "at",     "based",   "before",  "between", "by",    "during",  "effect",
      "effects", "for",    "from",    "in",      "into",   "is",     "its",     "meta",
      "not",     "of",     "on",      "or",      "review", "reviews", "study",  "studies",
      "systematic", "the", "their",   "to",      "under",  "use",    "versus",  "vs",
      "with",    "within", "without", "analysis", "evidence", "comparison", "who"};
  return words;
}

std::string term_group(const std::string& word) {
  const std::size_t letters = detail::codepoint_length(word);
  if (letters >= 7 && word.find('-') == std::string::npos) {
    const std::string stem = word.substr(0, word.size() - 2);
    return "(" + word + "[tiab] OR " + stem + "*[tiab])";
  }
  return word + "[tiab]";
}

}  // namespace

std::string_view to_string(PromptKind kind) noexcept {
  switch (kind) {
    case PromptKind::no_reasoning: return "no_reasoning";
    case PromptKind::free_reasoning: return "free_reasoning";
    case PromptKind::conceptual: return "conceptual";
    case PromptKind::objective: return "objective";
  }
  return "?";
}

PromptKind prompt_kind_from_string(std::string_view name) {
  for (PromptKind k : kKinds) {
    if (to_string(k) == name) return k;
  }
  throw ContractError("unknown prompt kind '" + std::string(name) + "'");
}

OutputMode output_mode(PromptKind kind) noexcept {
  return kind == PromptKind::no_reasoning ? OutputMode::no_reasoning : OutputMode::reasoning;
}

std::string PromptTemplate::render(std::string_view title) const {
  static constexpr std::string_view kSlot = "{topic}";
  std::string out;
  std::size_t pos = 0;
  for (std::size_t hit; (hit = user.find(kSlot, pos)) != std::string::npos; pos = hit + kSlot.size()) {
    out.append(user, pos, hit - pos);
    out += title;
  }
  out.append(user, pos);
  return out;
}

std::filesystem::path default_prompt_dir() {
  if (const char* dir = std::getenv("BOOLSEARCH_PROMPT_DIR"); dir && *dir) return dir;
  return std::filesystem::path(BOOLSEARCH_DATA_DIR) / "prompts";
}

PromptTemplate load_prompt(PromptKind kind, const std::filesystem::path& dir) {
  const auto path = dir / (std::string(to_string(kind)) + ".json");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open prompt file " + path.string());
  try {
    const auto doc = nlohmann::json::parse(in);
    PromptTemplate t{doc.at("system").get<std::string>(), doc.at("user").get<std::string>()};
    if (t.user.find("{topic}") == std::string::npos) {
      throw DataError("prompt " + path.string() + " has no {topic} slot");
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed prompt file " + path.string() + ": " + e.what());
  }
}

ReplayGenerator ReplayGenerator::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open replay file " + path.string());
  std::map<std::pair<std::string, int>, std::string> outputs;
  std::size_t number = 0;
  for (std::string line; std::getline(in, line);) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const int attempt = j.at("attempt").get<int>();
      if (attempt < 1) throw DataError("attempt must be >= 1");
      outputs[{j.at("topic").get<std::string>(), attempt}] = j.at("output").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError("line " + std::to_string(number) + ": " + e.what(), number);
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(number) + ": " + e.what(), number);
    }
  }
  return ReplayGenerator(std::move(outputs), "replay:" + path.filename().string());
}

std::string ReplayGenerator::generate(const GenerationRequest& request) {
  const auto it = outputs_.find({request.topic_id, request.attempt});
  return it == outputs_.end() ? std::string() : it->second;
}

ScriptedGenerator ScriptedGenerator::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open script file " + path.string());
  try {
    return ScriptedGenerator(
        nlohmann::json::parse(in).get<std::map<std::string, std::vector<std::string>>>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed script file " + path.string() + ": " + e.what());
  }
}

std::string ScriptedGenerator::generate(const GenerationRequest& request) {
  const auto it = scripts_.find(request.topic_id);
  if (it == scripts_.end() || it->second.empty()) return {};
  const auto& outputs = it->second;
  const auto index = std::min<std::size_t>(static_cast<std::size_t>(std::max(request.attempt, 1)) - 1,
                                           outputs.size() - 1);
  return outputs[index];
}

std::string TemplateGenerator::generate(const GenerationRequest& request) {
  std::vector<std::string> words;
  for (auto& token : tokenize(request.title)) {
    if (token.size() < 3 || stopwords().count(token)) continue;
    if (std::find(words.begin(), words.end(), token) == words.end()) words.push_back(token);
  }

  const std::string key = std::to_string(seed_) + '\n' + request.topic_id + '\n' +
                          std::to_string(request.attempt);
  std::mt19937_64 engine(std::stoull(fnv1a_hex(key), nullptr, 16));
  const std::size_t k = std::min<std::size_t>(words.size(), 3);
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(words[i], words[i + uniform_index(engine, words.size() - i)]);
  }
  words.resize(k);

  std::string query;
  for (const auto& w : words) {
    if (!query.empty()) query += " AND ";
    query += term_group(w);
  }
  std::string out;
  if (output_mode(request.kind) == OutputMode::reasoning) {
    out += "<think>Concept words:";
    for (const auto& w : words) out += " " + w;
    out += "</think>\n";
  }
  return out + "<answer>" + query + "</answer>";
}

PostFunction http_post(std::chrono::seconds timeout) {
  return [timeout](const std::string& url, const std::string& body, const std::string& token) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) throw TransportError("invalid URL: " + url, 0, false);
    const auto path = url.find('/', scheme + 3);
    httplib::Client client(url.substr(0, path));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    if (!token.empty()) client.set_bearer_token_auth(token);
    auto result = client.Post(path == std::string::npos ? "/" : url.substr(path), body,
                              "application/json");
    if (!result) {
      throw TransportError("request failed: " + httplib::to_string(result.error()), 0, true);
    }
    return HttpResponse{result->status, result->body};
  };
}

RemoteGenerator::RemoteGenerator(RemoteGeneratorConfig config, PostFunction post)
    : config_(std::move(config)), post_(std::move(post)) {
  if (config_.endpoint.empty()) throw ContractError("remote generator needs an endpoint");
  if (const char* token = std::getenv(config_.api_key_env.c_str()); token && *token) {
    token_ = token;
  }
  for (PromptKind k : kKinds) prompts_.emplace(k, load_prompt(k, config_.prompt_dir));
}

std::string RemoteGenerator::generate(const GenerationRequest& request) {
  const PromptTemplate& prompt = prompts_.at(request.kind);
  const nlohmann::json body{
      {"model", config_.model},
      {"temperature", config_.temperature},
      {"messages",
       {{{"role", "system"}, {"content", prompt.system}},
        {{"role", "user"}, {"content", prompt.render(request.title)}}}}};
  const HttpResponse response = post_(config_.endpoint, body.dump(), token_);
  if (response.status != 200) {
    const bool retryable = response.status == 429 || response.status >= 500;
    throw TransportError("generator returned HTTP " + std::to_string(response.status),
                         response.status, retryable);
  }
  try {
    const auto doc = nlohmann::json::parse(response.body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed generator response: ") + e.what(), 200, true);
  }
}

}  // namespace boolsearch
