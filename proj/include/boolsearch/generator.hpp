#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "boolsearch/entrez.hpp"
#include "boolsearch/validity.hpp"

namespace boolsearch {

enum class PromptKind { no_reasoning, free_reasoning, conceptual, objective };

std::string_view to_string(PromptKind kind) noexcept;
/// Throws ContractError on an unknown name.
PromptKind prompt_kind_from_string(std::string_view name);
/// no_reasoning expects a bare answer block; the others expect think then answer.
OutputMode output_mode(PromptKind kind) noexcept;

struct PromptTemplate {
  std::string system;
  std::string user;  ///< contains `{topic}`

  /// User message with every `{topic}` replaced by the title.
  std::string render(std::string_view title) const;
};

/// Directory holding <kind>.json prompt files shipped with the project.
std::filesystem::path default_prompt_dir();
PromptTemplate load_prompt(PromptKind kind, const std::filesystem::path& dir = default_prompt_dir());

struct GenerationRequest {
  std::string topic_id;
  std::string title;
  PromptKind kind = PromptKind::no_reasoning;
  int attempt = 1;  ///< 1-based
};

/// Produces one raw model output per request. May throw TransportError.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::string generate(const GenerationRequest& request) = 0;
  virtual std::string identity() const = 0;
};

/// Pre-generated outputs from JSON lines {"topic", "attempt", "output"}. A request with no
/// recorded output yields an empty string.
class ReplayGenerator final : public Generator {
 public:
  explicit ReplayGenerator(std::map<std::pair<std::string, int>, std::string> outputs,
                           std::string identity = "replay")
      : outputs_(std::move(outputs)), identity_(std::move(identity)) {}
  static ReplayGenerator load(const std::filesystem::path& path);

  std::string generate(const GenerationRequest& request) override;
  std::string identity() const override { return identity_; }

 private:
  std::map<std::pair<std::string, int>, std::string> outputs_;
  std::string identity_;
};

/// Fixed per-topic output sequences. Attempts past the end repeat the last output;
/// unknown topics yield an empty string.
class ScriptedGenerator final : public Generator {
 public:
  explicit ScriptedGenerator(std::map<std::string, std::vector<std::string>> scripts)
      : scripts_(std::move(scripts)) {}
  /// JSON object {topic_id: [output, ...]}.
  static ScriptedGenerator load(const std::filesystem::path& path);

  std::string generate(const GenerationRequest& request) override;
  std::string identity() const override { return "scripted"; }

 private:
  std::map<std::string, std::vector<std::string>> scripts_;
};

/// Deterministic queries assembled from the content words of the title. Each attempt
/// draws a different subset, so regeneration changes the query.
class TemplateGenerator final : public Generator {
 public:
  explicit TemplateGenerator(std::uint64_t seed) : seed_(seed) {}
  std::string generate(const GenerationRequest& request) override;
  std::string identity() const override { return "template:" + std::to_string(seed_); }

 private:
  std::uint64_t seed_;
};

struct RemoteGeneratorConfig {
  std::string endpoint;  ///< chat-completions URL
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";
  double temperature = 0.6;
  std::filesystem::path prompt_dir = default_prompt_dir();
};

/// POSTs a JSON body with a bearer token; returns the HTTP response.
using PostFunction = std::function<HttpResponse(const std::string& url, const std::string& body,
                                                const std::string& token)>;

/// HTTPS POST through cpp-httplib.
PostFunction http_post(std::chrono::seconds timeout = std::chrono::seconds(120));

/// OpenAI-style chat-completions client. The API key is read at construction from the
/// environment variable named in the config.
class RemoteGenerator final : public Generator {
 public:
  RemoteGenerator(RemoteGeneratorConfig config, PostFunction post);
  std::string generate(const GenerationRequest& request) override;
  std::string identity() const override { return "remote:" + config_.model; }

 private:
  RemoteGeneratorConfig config_;
  PostFunction post_;
  std::string token_;
  std::map<PromptKind, PromptTemplate> prompts_;
};

}  // namespace boolsearch
