#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pairlens/jsonl.hpp"

namespace pairlens {

struct RetryPolicy {
  int max_attempts = 3;
  int backoff_base_ms = 200;  // doubles per attempt
};

// One client configuration per backend role (respondent, judge, translator).
// base_url "mock://<kind>" selects an in-process mock backend; everything else
// speaks the chat-completions wire protocol over HTTP(S).
struct BackendConfig {
  std::string name;
  std::string base_url;
  std::string model_id;
  std::string api_key_env;  // env var carrying the key; empty = unauthenticated
  double temperature = 1.0;
  int max_concurrency = 4;
  double timeout_s = 60.0;
  RetryPolicy retry;
  std::map<std::string, std::string> options;  // backend-specific knobs

  void validate() const;  // max_concurrency >= 1, temperature >= 0, url present
};

struct ToolSchema {
  std::string name;
  std::string description;
  Json parameters;  // JSON-schema object
};

struct ChatRequest {
  std::string system;
  std::string user;  // exactly one user turn per request
  std::optional<ToolSchema> tool_schema;
  std::optional<std::string> response_language_directive;

  // The user turn as sent: user text plus the language directive, if any.
  std::string effective_user() const;
};

struct ChatResult {
  std::string raw_text;
  std::optional<Json> tool_arguments;
  std::optional<Json> usage;
  double latency_ms = 0.0;
  int attempts = 1;
};

// Transient transport failures (connect errors, non-2xx) — retried up to
// retry.max_attempts with exponential backoff before surfacing.
struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A tool schema was requested but the reply carried no tool call. Not retried
// here; the caller decides between refusal handling and a retry.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sends one chat request. At most cfg.max_concurrency calls are in flight per
// backend name, enforced for real and mock backends alike.
ChatResult complete(const BackendConfig& cfg, const ChatRequest& req);

// Translator front end: returns the backend's translation of `text` verbatim.
std::string translate(const BackendConfig& cfg, const std::string& text,
                      const std::string& target_language);

// ---- Mock backends -------------------------------------------------------

using Lexicons = std::map<std::string, std::vector<std::string>>;

struct BiasRule {
  std::string marker;  // arm marker word/phrase looked up in the prompt
  std::vector<std::string> categories;
  double rate = 0.0;
};

// Drives the deterministic mock respondent: the base text is derived from the
// request with all markers stripped (so a rate of 0 makes both arms
// byte-identical), and the matched rule injects lexicon words per category
// with the configured probability.
struct BiasProfile {
  std::uint64_t seed = 0;
  std::vector<BiasRule> rules;
  Lexicons lexicons;
};

BiasProfile bias_profile_from_json(const Json& j);
Json to_json(const BiasProfile& p);

// Pure function of (profile, request). Replies in the respondent answer
// format: {"answer": "..."}.
ChatResult mock_respondent(const BiasProfile& profile, const ChatRequest& req);

// Keyword-count judge surrogate: per category, clamp(count_a - count_b, -3, 3)
// over whole-token lexicon hits. Anti-symmetric under argument swap by
// construction. Lexicons must cover all 19 categories (empty lists allowed).
std::map<std::string, int> mock_judge_scores(const Lexicons& lexicons,
                                             const std::string& text_a,
                                             const std::string& text_b);

Lexicons load_lexicons(const std::string& path);

// Registers/unregisters a custom in-process backend reachable under
// base_url "mock://<key>". Used by tests for scripted and fault-injection
// backends; built-in kinds (echo, respondent, judge, translate-identity,
// translate-dict) resolve when no custom handler matches.
using MockHandler = std::function<ChatResult(const BackendConfig&, const ChatRequest&)>;
void register_mock(const std::string& key, MockHandler handler);
void unregister_mock(const std::string& key);

// Payload extraction for translator mocks (text after the instruction block).
std::string translation_payload(const std::string& user_text);

Json to_json(const BackendConfig& cfg);
BackendConfig backend_config_from_json(const Json& j);

}  // namespace pairlens
